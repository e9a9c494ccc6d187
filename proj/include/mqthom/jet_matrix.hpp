#pragma once

#include <cstddef>
#include <sstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/jet.hpp"

namespace mqthom {

/// Dense rectangular matrix of jets sharing one (base_dim, order).
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(std::size_t rows, std::size_t cols, int base_dim, int order)
      : rows_(rows), cols_(cols), base_dim_(base_dim), order_(order),
        entries_(rows * cols, Jet(base_dim, order)) {}

  static JetMatrix identity(std::size_t n, int base_dim, int order) {
    JetMatrix m(n, n, base_dim, order);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Jet::constant(base_dim, order, Scalar(1));
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int base_dim() const { return base_dim_; }
  int order() const { return order_; }

  Jet& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Jet& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  JetMatrix transpose() const {
    JetMatrix t(cols_, rows_, base_dim_, order_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("jet matrix product shape mismatch");
    JetMatrix out(a.rows_, b.cols_, a.base_dim_, a.order_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Jet& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) aik.accumulate_product(b(k, j), out(i, j));
      }
    return out;
  }

  friend JetMatrix operator+(JetMatrix a, const JetMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] += b.entries_[i];
    return a;
  }

  friend JetMatrix operator-(JetMatrix a, const JetMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] -= b.entries_[i];
    return a;
  }

  JetMatrix operator-() const {
    JetMatrix out = *this;
    for (auto& e : out.entries_) e = -e;
    return out;
  }

  /// Entrywise product with a jet (scalar function multiple).
  friend JetMatrix operator*(const Jet& f, JetMatrix m) {
    for (auto& e : m.entries_) e = f * e;
    return m;
  }

  /// Entrywise d/dt_{a+1}.
  JetMatrix derivative(int a) const {
    JetMatrix out = *this;
    for (auto& e : out.entries_) e = e.derivative(a);
    return out;
  }

  JetMatrix submatrix(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
    if (row0 + rows > rows_ || col0 + cols > cols_) throw DimensionMismatch("submatrix out of range");
    JetMatrix out(rows, cols, base_dim_, order_);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(row0 + i, col0 + j);
    return out;
  }

  void set_block(std::size_t row0, std::size_t col0, const JetMatrix& block) {
    if (row0 + block.rows_ > rows_ || col0 + block.cols_ > cols_) throw DimensionMismatch("block out of range");
    for (std::size_t i = 0; i < block.rows_; ++i)
      for (std::size_t j = 0; j < block.cols_; ++j) (*this)(row0 + i, col0 + j) = block(i, j);
  }

  static JetMatrix block_diagonal(const JetMatrix& a, const JetMatrix& b) {
    JetMatrix out(a.rows_ + b.rows_, a.cols_ + b.cols_, a.base_dim_, a.order_);
    out.set_block(0, 0, a);
    out.set_block(a.rows_, a.cols_, b);
    return out;
  }

  bool is_square() const { return rows_ == cols_; }

  bool is_skew() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i; j < cols_; ++j)
        if (!((*this)(i, j) + (*this)(j, i)).is_zero()) return false;
    return true;
  }

  /// Entrywise equality up to total base degree `order`.
  friend bool equal_to_order(const JetMatrix& a, const JetMatrix& b, int order) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
      if (!equal_to_order(a.entries_[i], b.entries_[i], order)) return false;
    return true;
  }

  friend bool operator==(const JetMatrix& a, const JetMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

  /// M^T M == 1 through the declared order.
  bool has_orthonormal_columns() const {
    return equal_to_order(transpose() * *this, identity(cols_, base_dim_, order_), order_);
  }

  /// Rational matrix of constant terms; throws if any is not rational.
  std::vector<std::vector<Rational>> constant_part() const {
    std::vector<std::vector<Rational>> c(rows_, std::vector<Rational>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const Scalar& s = (*this)(i, j).value_at_origin();
        if (!s.is_rational()) throw NotInvertible("constant term is not rational");
        c[i][j] = s.rational_part();
      }
    return c;
  }

  /// Inverse of a square jet matrix with invertible rational constant part.
  JetMatrix inverse() const {
    if (!is_square()) throw DimensionMismatch("inverse of non-square matrix");
    const auto c0_inv = rational_inverse(constant_part());
    JetMatrix b0_inv(rows_, cols_, base_dim_, order_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) b0_inv(i, j) = Jet::constant(base_dim_, order_, Scalar(c0_inv[i][j]));
    // B = B0 (1 + U) with U = B0^{-1} (B - B0) nilpotent modulo truncation.
    JetMatrix nilpotent = *this;
    for (auto& e : nilpotent.entries_) e.set_coeff(0, Scalar());
    const JetMatrix neg_u = -(b0_inv * nilpotent);
    JetMatrix sum = identity(rows_, base_dim_, order_);
    JetMatrix power = sum;
    for (int k = 1; k <= order_; ++k) {
      power = power * neg_u;
      sum = sum + power;
    }
    return sum * b0_inv;
  }

  static std::vector<std::vector<Rational>> rational_inverse(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && sgn(m[pivot][col]) == 0) ++pivot;
      if (pivot == n) throw NotInvertible("singular rational matrix");
      std::swap(m[col], m[pivot]);
      std::swap(inv[col], inv[pivot]);
      const Rational p = m[col][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[col][j] /= p;
        inv[col][j] /= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || sgn(m[r][col]) == 0) continue;
        const Rational f = m[r][col];
        for (std::size_t j = 0; j < n; ++j) {
          m[r][j] -= f * m[col][j];
          inv[r][j] -= f * inv[col][j];
        }
      }
    }
    return inv;
  }

  static Rational rational_determinant(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && sgn(m[pivot][col]) == 0) ++pivot;
      if (pivot == n) return Rational(0);
      if (pivot != col) {
        std::swap(m[col], m[pivot]);
        det = -det;
      }
      det *= m[col][col];
      for (std::size_t r = col + 1; r < n; ++r) {
        if (sgn(m[r][col]) == 0) continue;
        const Rational f = m[r][col] / m[col][col];
        for (std::size_t j = col; j < n; ++j) m[r][j] -= f * m[col][j];
      }
    }
    return det;
  }

  friend std::ostream& operator<<(std::ostream& os, const JetMatrix& v) { return os << v.to_string(); }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
      os << "[";
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).to_string();
      os << "]\n";
    }
    return os.str();
  }

 private:
  void check_same_shape(const JetMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("jet matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int base_dim_ = 0;
  int order_ = 0;
  std::vector<Jet> entries_;
};

/// Jet matrix whose columns are orthonormal through the truncation order
/// (M^T M == 1). Square instances are orthogonal frames; rectangular ones are
/// isometric inclusions.
class OrthoJetMatrix {
 public:
  explicit OrthoJetMatrix(JetMatrix m) : m_(std::move(m)) {
    if (m_.rows() < m_.cols() || !m_.has_orthonormal_columns())
      throw NotOrthogonal("matrix columns are not orthonormal at truncation order");
  }

  static OrthoJetMatrix identity(std::size_t n, int base_dim, int order) {
    return OrthoJetMatrix(JetMatrix::identity(n, base_dim, order));
  }

  const JetMatrix& matrix() const { return m_; }
  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  bool is_square() const { return m_.is_square(); }
  const Jet& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// A^{-1}, realized as A^T.
  JetMatrix inverse() const {
    if (!is_square()) throw DimensionMismatch("inverse of a non-square isometry");
    return m_.transpose();
  }

  friend OrthoJetMatrix operator*(const OrthoJetMatrix& a, const OrthoJetMatrix& b) {
    return OrthoJetMatrix(a.m_ * b.m_);
  }

 private:
  JetMatrix m_;
};

}  // namespace mqthom
