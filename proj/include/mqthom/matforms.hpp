#pragma once

#include <cstddef>
#include <sstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/jet_matrix.hpp"

namespace mqthom {

/// Rectangular matrix of chart forms (connection, curvature and
/// Maurer-Cartan matrices). Products wedge entries in row-by-column order.
class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(std::size_t rows, std::size_t cols, const Chart& chart)
      : rows_(rows), cols_(cols), chart_(chart), entries_(rows * cols, ChartForm(chart)) {}

  /// Matrix of 0-forms.
  static FormMatrix from_jets(const JetMatrix& m, const Chart& chart) {
    FormMatrix out(m.rows(), m.cols(), chart);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!m(i, j).is_zero()) out(i, j) = ChartForm::function(chart, m(i, j));
    return out;
  }

  /// dM = sum_a (dM/dt_a) dt_a, entrywise.
  static FormMatrix differential(const JetMatrix& m, const Chart& chart) {
    FormMatrix out(m.rows(), m.cols(), chart);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        for (int a = 0; a < chart.base_dim; ++a) {
          Jet da = m(i, j).derivative(a);
          if (!da.is_zero()) out(i, j) += da * ChartForm::dt(chart, a);
        }
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Chart& chart() const { return chart_; }

  ChartForm& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const ChartForm& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  /// Plain transpose of the entry array (no sign changes).
  FormMatrix transpose() const {
    FormMatrix t(cols_, rows_, chart_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("form matrix product shape mismatch");
    FormMatrix out(a.rows_, b.cols_, a.chart_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) out(i, j) += wedge(a(i, k), b(k, j));
      }
    return out;
  }

  friend FormMatrix operator*(const JetMatrix& m, const FormMatrix& f) { return from_jets(m, f.chart_) * f; }
  friend FormMatrix operator*(const FormMatrix& f, const JetMatrix& m) { return f * from_jets(m, f.chart_); }

  friend FormMatrix operator+(FormMatrix a, const FormMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] += b.entries_[i];
    return a;
  }
  friend FormMatrix operator-(FormMatrix a, const FormMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] -= b.entries_[i];
    return a;
  }
  FormMatrix operator-() const {
    FormMatrix out = *this;
    for (auto& e : out.entries_) e = -e;
    return out;
  }
  friend FormMatrix operator*(const Scalar& s, FormMatrix a) {
    for (auto& e : a.entries_) e *= s;
    return a;
  }
  friend FormMatrix operator*(const Jet& f, FormMatrix a) {
    for (auto& e : a.entries_) e *= f;
    return a;
  }

  FormMatrix exterior_derivative() const {
    FormMatrix out = *this;
    for (auto& e : out.entries_) e = exterior_d(e);
    return out;
  }

  FormMatrix submatrix(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
    if (row0 + rows > rows_ || col0 + cols > cols_) throw DimensionMismatch("submatrix out of range");
    FormMatrix out(rows, cols, chart_);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(row0 + i, col0 + j);
    return out;
  }

  /// Rows and columns picked by index lists.
  FormMatrix select(const std::vector<int>& row_idx, const std::vector<int>& col_idx) const {
    FormMatrix out(row_idx.size(), col_idx.size(), chart_);
    for (std::size_t i = 0; i < row_idx.size(); ++i)
      for (std::size_t j = 0; j < col_idx.size(); ++j) out(i, j) = (*this)(row_idx[i], col_idx[j]);
    return out;
  }

  void set_block(std::size_t row0, std::size_t col0, const FormMatrix& block) {
    if (row0 + block.rows_ > rows_ || col0 + block.cols_ > cols_) throw DimensionMismatch("block out of range");
    for (std::size_t i = 0; i < block.rows_; ++i)
      for (std::size_t j = 0; j < block.cols_; ++j) (*this)(row0 + i, col0 + j) = block(i, j);
  }

  static FormMatrix block_diagonal(const FormMatrix& a, const FormMatrix& b) {
    FormMatrix out(a.rows_ + b.rows_, a.cols_ + b.cols_, a.chart_);
    out.set_block(0, 0, a);
    out.set_block(a.rows_, a.cols_, b);
    return out;
  }

  FormMatrix on_chart(const Chart& target) const {
    FormMatrix out(rows_, cols_, target);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].on_chart(target);
    return out;
  }

  FormMatrix truncated(int order) const {
    FormMatrix out = *this;
    for (auto& e : out.entries_) e = e.truncated(order);
    return out;
  }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  bool is_skew_to(int order) const {
    return rows_ == cols_ && equal_to_order(transpose(), -*this, order);
  }

  std::size_t term_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.term_count();
    return n;
  }

  friend std::optional<Witness> first_difference(const FormMatrix& a, const FormMatrix& b, int order) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return Witness{"<shape>", "shape mismatch", "shape mismatch"};
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        if (auto w = first_difference(a(i, j), b(i, j), order)) {
          w->term = "[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "] " + w->term;
          return w;
        }
    return std::nullopt;
  }

  friend bool equal_to_order(const FormMatrix& a, const FormMatrix& b, int order) {
    return !first_difference(a, b, order).has_value();
  }

  friend bool operator==(const FormMatrix& a, const FormMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.chart_ == b.chart_ && a.entries_ == b.entries_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FormMatrix& v) { return os << v.to_string(); }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        if ((*this)(i, j).is_zero()) continue;
        os << "[" << i + 1 << "," << j + 1 << "]\n" << (*this)(i, j).to_string();
      }
    return os.str();
  }

 private:
  void check_same_shape(const FormMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("form matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Chart chart_;
  std::vector<ChartForm> entries_;
};

/// Chart with the same base and no fiber variables.
inline Chart base_chart(int base_dim, int order) { return Chart(base_dim, 0, 0, order); }

/// Cayley transform (1 - S)(1 + S)^{-1} of a skew jet matrix: an exactly
/// orthogonal frame through the truncation order.
inline OrthoJetMatrix cayley(const JetMatrix& skew) {
  if (!skew.is_skew()) throw NotSkew("Cayley transform needs a skew-symmetric matrix");
  const std::size_t n = skew.rows();
  const JetMatrix one = JetMatrix::identity(n, skew.base_dim(), skew.order());
  return OrthoJetMatrix((one - skew) * (one + skew).inverse());
}

/// A^{-1} dA = A^T dA as a matrix of base 1-forms on `chart`.
inline FormMatrix maurer_cartan(const OrthoJetMatrix& a, const Chart& chart) {
  if (!a.is_square()) throw NotOrthogonal("Maurer-Cartan form needs a square orthogonal frame");
  return a.inverse() * FormMatrix::differential(a.matrix(), chart);
}

inline FormMatrix maurer_cartan(const OrthoJetMatrix& a) {
  return maurer_cartan(a, base_chart(a.matrix().base_dim(), a.matrix().order()));
}

enum class Block { oo, oh, ho, hh };

/// One of the four blocks of a square matrix split after index `split`.
inline FormMatrix block(const FormMatrix& m, Block which, std::size_t split) {
  if (m.rows() != m.cols() || split > m.rows()) throw DimensionMismatch("block split out of range");
  const std::size_t n = m.rows();
  switch (which) {
    case Block::oo: return m.submatrix(0, 0, split, split);
    case Block::oh: return m.submatrix(0, split, split, n - split);
    case Block::ho: return m.submatrix(split, 0, n - split, split);
    case Block::hh: return m.submatrix(split, split, n - split, n - split);
  }
  throw DimensionMismatch("unknown block");
}

/// dtheta + theta theta.
inline FormMatrix curvature_structure(const FormMatrix& theta) {
  if (theta.rows() != theta.cols()) throw DimensionMismatch("curvature needs a square connection matrix");
  return theta.exterior_derivative() + theta * theta;
}

struct Connection {
  FormMatrix theta;
  FormMatrix omega;
};

/// Connection and curvature induced on the span of the first `split` frame
/// columns: theta = (A^T dA)_oo, omega = -(A^T dA)_oh (A^T dA)_ho.
inline Connection restricted_connection(const OrthoJetMatrix& a, std::size_t split, const Chart& chart) {
  if (!a.is_square() || split >= a.rows()) throw DimensionMismatch("restriction split out of range");
  const FormMatrix mc = maurer_cartan(a, chart);
  return Connection{block(mc, Block::oo, split), -(block(mc, Block::oh, split) * block(mc, Block::ho, split))};
}

inline Connection restricted_connection(const OrthoJetMatrix& a, std::size_t split) {
  return restricted_connection(a, split, base_chart(a.matrix().base_dim(), a.matrix().order()));
}

/// Constrained connection form (theta + Q theta Q + Q dQ) / 2 for an
/// involution Q; it preserves both eigen-subbundles of Q.
inline FormMatrix constrain(const FormMatrix& theta, const JetMatrix& q) {
  if (!q.is_square() || q.rows() != theta.rows() || theta.rows() != theta.cols())
    throw DimensionMismatch("constrain needs square matrices of equal size");
  const JetMatrix one = JetMatrix::identity(q.rows(), q.base_dim(), q.order());
  if (!equal_to_order(q * q, one, q.order())) throw NotInvolution("Q * Q != 1");
  const FormMatrix qf = FormMatrix::from_jets(q, theta.chart());
  const FormMatrix sum = theta + qf * theta * qf + qf * FormMatrix::differential(q, theta.chart());
  return Scalar::fraction(1, 2) * sum;
}

/// diag(-1_n, 1_m).
inline JetMatrix reflection_q0(std::size_t n, std::size_t m, int base_dim, int order) {
  JetMatrix q = JetMatrix::identity(n + m, base_dim, order);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = Jet::constant(base_dim, order, Scalar(-1));
  return q;
}

}  // namespace mqthom
