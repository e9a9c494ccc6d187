#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/scalar.hpp"

namespace mqthom {

using MultiIndex = std::vector<int>;

/// Enumeration of the monomials t^alpha with |alpha| <= order in base_dim
/// variables, together with the product and derivative tables over it.
/// Monomials are ordered by total degree, then lexicographically descending
/// in the exponent vector (so t1 comes before t2).
class JetLayout {
 public:
  JetLayout(int base_dim, int order) : base_dim_(base_dim), order_(order) {
    MultiIndex current(static_cast<std::size_t>(base_dim), 0);
    for (int deg = 0; deg <= order; ++deg) enumerate(deg, 0, current);
    for (std::size_t i = 0; i < monomials_.size(); ++i) index_[monomials_[i]] = static_cast<int>(i);

    const std::size_t n = monomials_.size();
    product_.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (degrees_[i] + degrees_[j] > order) continue;
        MultiIndex sum = monomials_[i];
        for (int a = 0; a < base_dim; ++a) sum[a] += monomials_[j][a];
        product_[i * n + j] = index_.at(sum);
      }

    derivative_.resize(static_cast<std::size_t>(base_dim));
    for (int a = 0; a < base_dim; ++a) {
      derivative_[a].assign(n, {-1, 0});
      for (std::size_t i = 0; i < n; ++i) {
        const int e = monomials_[i][a];
        if (e == 0) continue;
        MultiIndex lowered = monomials_[i];
        --lowered[a];
        derivative_[a][i] = {index_.at(lowered), e};
      }
    }
  }

  int base_dim() const { return base_dim_; }
  int order() const { return order_; }
  std::size_t size() const { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
  int degree(std::size_t i) const { return degrees_[i]; }

  int index_of(const MultiIndex& alpha) const {
    auto it = index_.find(alpha);
    return it == index_.end() ? -1 : it->second;
  }

  /// Index of monomial(i) * monomial(j), or -1 when truncated away.
  int product(std::size_t i, std::size_t j) const { return product_[i * monomials_.size() + j]; }

  /// (index of d/dt_a monomial(i), exponent factor); index -1 when zero.
  std::pair<int, int> derivative(int a, std::size_t i) const { return derivative_[a][i]; }

  /// Shared, immutable layout for (base_dim, order).
  static std::shared_ptr<const JetLayout> get(int base_dim, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{base_dim, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(base_dim, order);
    return slot;
  }

 private:
  void enumerate(int remaining, int pos, MultiIndex& current) {
    if (pos == base_dim_) {
      if (remaining == 0) {
        monomials_.push_back(current);
        int deg = 0;
        for (int e : current) deg += e;
        degrees_.push_back(deg);
      }
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[pos] = e;
      enumerate(remaining - e, pos + 1, current);
    }
    current[pos] = 0;
  }

  int base_dim_;
  int order_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degrees_;
  std::map<MultiIndex, int> index_;
  std::vector<int> product_;
  std::vector<std::vector<std::pair<int, int>>> derivative_;
};

/// Truncated multivariate Taylor polynomial in t_1..t_d with Scalar
/// coefficients; all products drop monomials of total degree above order().
class Jet {
 public:
  Jet() : Jet(0, 0) {}
  Jet(int base_dim, int order) : layout_(JetLayout::get(base_dim, order)), coeffs_(layout_->size()) {}

  static Jet constant(int base_dim, int order, const Scalar& c) {
    Jet j(base_dim, order);
    j.coeffs_[0] = c;
    return j;
  }

  /// The coordinate function t_{a+1} (a is zero based).
  static Jet variable(int base_dim, int order, int a) {
    if (a < 0 || a >= base_dim) throw DimensionMismatch("jet variable index out of range");
    Jet j(base_dim, order);
    if (order >= 1) {
      MultiIndex alpha(static_cast<std::size_t>(base_dim), 0);
      alpha[a] = 1;
      j.coeffs_[j.layout_->index_of(alpha)] = Scalar(1);
    }
    return j;
  }

  static Jet monomial(int base_dim, int order, const MultiIndex& alpha, const Scalar& c) {
    Jet j(base_dim, order);
    const int idx = j.layout_->index_of(alpha);
    if (idx >= 0) j.coeffs_[idx] = c;
    return j;
  }

  int base_dim() const { return layout_->base_dim(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }
  std::size_t size() const { return coeffs_.size(); }
  const Scalar& coeff(std::size_t i) const { return coeffs_[i]; }
  void set_coeff(std::size_t i, Scalar c) { coeffs_[i] = std::move(c); }

  Scalar coefficient(const MultiIndex& alpha) const {
    const int idx = layout_->index_of(alpha);
    return idx < 0 ? Scalar() : coeffs_[idx];
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  /// True when every coefficient of total degree <= order vanishes.
  bool is_zero_to(int order) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (layout_->degree(i) <= order && !coeffs_[i].is_zero()) return false;
    return true;
  }

  const Scalar& value_at_origin() const { return coeffs_[0]; }

  /// Copy with all coefficients of degree > order cleared (declared order kept).
  Jet truncated(int order) const {
    Jet out = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (layout_->degree(i) > order) out.coeffs_[i] = Scalar();
    return out;
  }

  Jet operator-() const {
    Jet out = *this;
    for (auto& c : out.coeffs_)
      if (!c.is_zero()) c = -c;
    return out;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!o.coeffs_[i].is_zero()) coeffs_[i] += o.coeffs_[i];
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!o.coeffs_[i].is_zero()) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }

  Jet& operator*=(const Scalar& s) {
    for (auto& c : coeffs_)
      if (!c.is_zero()) c = c * s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Scalar& s) { return a *= s; }
  friend Jet operator*(const Scalar& s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet out(a.layout_);
    a.accumulate_product(b, out);
    return out;
  }

  /// out += this * b, truncated.
  void accumulate_product(const Jet& b, Jet& out) const {
    const std::size_t n = coeffs_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (coeffs_[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b.coeffs_[j].is_zero()) continue;
        const int k = layout_->product(i, j);
        if (k < 0) continue;
        out.coeffs_[k] += coeffs_[i] * b.coeffs_[j];
      }
    }
  }

  /// d/dt_{a+1}; keeps the declared order, so the top-degree coefficients of
  /// the result are zero rather than the true derivative data.
  Jet derivative(int a) const {
    if (a < 0 || a >= base_dim()) throw DimensionMismatch("derivative index out of range");
    Jet out(layout_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_zero()) continue;
      const auto [target, factor] = layout_->derivative(a, i);
      if (target < 0) continue;
      out.coeffs_[target] += coeffs_[i] * Scalar(static_cast<long>(factor));
    }
    return out;
  }

  /// Multiplicative inverse; requires a nonzero rational constant term.
  Jet inverse() const {
    const Scalar& c0 = coeffs_[0];
    if (c0.is_zero() || !c0.is_rational()) throw NotInvertible("jet constant term is not an invertible rational");
    const Rational inv0 = 1 / c0.rational_part();
    // f = c0 (1 + u), u without constant term; 1/f = (1/c0) sum (-u)^k.
    Jet neg_u = *this * Scalar(Rational(-inv0));
    neg_u.coeffs_[0] = Scalar();
    Jet result = constant(base_dim(), order(), Scalar(1));
    Jet power = result;
    for (int k = 1; k <= order(); ++k) {
      power = power * neg_u;
      result += power;
    }
    return result * Scalar(inv0);
  }

  /// Value of the truncated polynomial (terms of degree <= order) at a point.
  double evaluate(std::span<const double> point, int order) const {
    if (static_cast<int>(point.size()) != base_dim()) throw DimensionMismatch("evaluation point has wrong dimension");
    double v = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_zero() || layout_->degree(i) > order) continue;
      double m = coeffs_[i].to_double();
      const auto& alpha = layout_->monomial(i);
      for (int a = 0; a < base_dim(); ++a)
        for (int e = 0; e < alpha[a]; ++e) m *= point[a];
      v += m;
    }
    return v;
  }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.base_dim() == b.base_dim() && a.order() == b.order() && a.coeffs_ == b.coeffs_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Jet& v) { return os << v.to_string(); }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      os << "(" << coeffs_[i].to_string() << ")";
      const auto& alpha = layout_->monomial(i);
      for (int a = 0; a < base_dim(); ++a) {
        if (alpha[a] == 0) continue;
        os << "*t" << (a + 1);
        if (alpha[a] > 1) os << "^" << alpha[a];
      }
    }
    return first ? "0" : os.str();
  }

 private:
  explicit Jet(std::shared_ptr<const JetLayout> layout)
      : layout_(std::move(layout)), coeffs_(layout_->size()) {}

  void check_compatible(const Jet& o) const {
    if (layout_ != o.layout_) throw DimensionMismatch("jet base dimension or order mismatch");
  }

  std::shared_ptr<const JetLayout> layout_;
  std::vector<Scalar> coeffs_;
};

/// Equality of all coefficients of total degree <= order.
inline bool equal_to_order(const Jet& a, const Jet& b, int order) { return (a - b).is_zero_to(order); }

}  // namespace mqthom
