#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/jet.hpp"
#include "mqthom/jet_matrix.hpp"

namespace mqthom {

inline constexpr int kMaxFiberDim = 8;
inline constexpr int kMaxGenerators = 32;

/// Local chart of a vector bundle: base coordinates t_1..t_d, fiber
/// coordinates x_1..x_N. The first fiber_split fiber coordinates span the
/// distinguished subbundle. Indices in the API are zero based.
struct Chart {
  int base_dim = 0;
  int fiber_dim = 0;
  int fiber_split = 0;
  int order = 0;
  std::vector<int> orientation;  // permutation of 0..fiber_dim-1

  Chart() = default;
  Chart(int base_dim_, int fiber_dim_, int fiber_split_, int order_, std::vector<int> orientation_ = {})
      : base_dim(base_dim_), fiber_dim(fiber_dim_), fiber_split(fiber_split_), order(order_),
        orientation(std::move(orientation_)) {
    if (orientation.empty()) {
      orientation.resize(static_cast<std::size_t>(fiber_dim));
      std::iota(orientation.begin(), orientation.end(), 0);
    }
    validate();
  }

  void validate() const {
    if (base_dim < 0 || fiber_dim < 0 || order < 0) throw DimensionMismatch("negative chart dimension");
    if (fiber_dim > kMaxFiberDim) throw Unsupported("fiber dimension exceeds " + std::to_string(kMaxFiberDim));
    if (base_dim + fiber_dim > kMaxGenerators) throw Unsupported("too many Grassmann generators");
    if (fiber_split < 0 || fiber_split > fiber_dim) throw DimensionMismatch("fiber split out of range");
    std::vector<int> sorted = orientation;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = static_cast<int>(sorted.size()) == fiber_dim;
    for (int i = 0; permutation && i < fiber_dim; ++i) permutation = sorted[i] == i;
    if (!permutation) throw DimensionMismatch("orientation is not a permutation of the fiber indices");
  }

  int generator_count() const { return base_dim + fiber_dim; }
  int dt_generator(int a) const { return a; }
  int dx_generator(int i) const { return base_dim + i; }

  /// Same base, different fiber layout.
  Chart with_fibers(int fiber_dim_, int fiber_split_) const {
    return Chart(base_dim, fiber_dim_, fiber_split_, order);
  }

  friend bool operator==(const Chart&, const Chart&) = default;
};

// ---------------------------------------------------------------------------
// Grassmann sign bookkeeping. Every reordering sign in the library comes from
// these two functions.
// ---------------------------------------------------------------------------

using GrassmannMask = std::uint32_t;

/// Sign of m_a ^ m_b relative to the canonical monomial m_a | m_b, where both
/// are products of generators in increasing order; 0 if they share one.
inline int merge_sign(GrassmannMask a, GrassmannMask b) {
  if (a & b) return 0;
  int inversions = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    // generators of a that sit after generator j
    const GrassmannMask above = j >= 31 ? 0u : (a & ~((GrassmannMask{2} << j) - 1u));
    inversions += std::popcount(above);
  }
  return (inversions & 1) ? -1 : 1;
}

/// Parity of a permutation given as a sequence of distinct integers.
inline int permutation_sign(const std::vector<int>& seq) {
  int inversions = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++inversions;
  return (inversions & 1) ? -1 : 1;
}

/// Exponents of the fiber coordinates in a fiber monomial.
struct FiberExponent {
  std::array<std::uint8_t, kMaxFiberDim> e{};

  int operator[](int i) const { return e[i]; }
  int total() const {
    int s = 0;
    for (auto v : e) s += v;
    return s;
  }
  FiberExponent operator+(const FiberExponent& o) const {
    FiberExponent r;
    for (int i = 0; i < kMaxFiberDim; ++i) {
      const int v = e[i] + o.e[i];
      if (v > 255) throw Unsupported("fiber exponent overflow");
      r.e[i] = static_cast<std::uint8_t>(v);
    }
    return r;
  }
  FiberExponent shifted(int i, int delta) const {
    FiberExponent r = *this;
    r.e[i] = static_cast<std::uint8_t>(r.e[i] + delta);
    return r;
  }
  auto operator<=>(const FiberExponent&) const = default;
};

struct TermKey {
  GrassmannMask mask = 0;
  FiberExponent xexp;
  auto operator<=>(const TermKey&) const = default;
};

/// First term at which two forms differ, with both coefficients rendered.
struct Witness {
  std::string term;
  std::string lhs;
  std::string rhs;
};

/// Differential form on a chart: sum over Grassmann monomials in dt, dx of
/// (fiber polynomial x jet) coefficients.
class ChartForm {
 public:
  using Terms = std::map<TermKey, Jet>;

  ChartForm() = default;
  explicit ChartForm(Chart chart) : chart_(std::move(chart)) {}

  static ChartForm constant(const Chart& chart, const Scalar& c) {
    return function(chart, Jet::constant(chart.base_dim, chart.order, c));
  }
  static ChartForm one(const Chart& chart) { return constant(chart, Scalar(1)); }

  static ChartForm function(const Chart& chart, const Jet& f) {
    ChartForm out(chart);
    out.add_term(TermKey{}, f);
    return out;
  }

  /// Base coordinate function t_{a+1}.
  static ChartForm t(const Chart& chart, int a) {
    return function(chart, Jet::variable(chart.base_dim, chart.order, a));
  }

  /// Fiber coordinate function x_{i+1}.
  static ChartForm x(const Chart& chart, int i) {
    check_fiber_index(chart, i);
    ChartForm out(chart);
    TermKey key;
    key.xexp.e[i] = 1;
    out.add_term(key, Jet::constant(chart.base_dim, chart.order, Scalar(1)));
    return out;
  }

  static ChartForm dt(const Chart& chart, int a) {
    if (a < 0 || a >= chart.base_dim) throw DimensionMismatch("base differential index out of range");
    return generator(chart, chart.dt_generator(a));
  }

  static ChartForm dx(const Chart& chart, int i) {
    check_fiber_index(chart, i);
    return generator(chart, chart.dx_generator(i));
  }

  const Chart& chart() const { return chart_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Adds c * (monomial key) and drops the entry if it cancels.
  void add_term(const TermKey& key, const Jet& c, int sign = 1) {
    if (c.is_zero() || sign == 0) return;
    auto it = terms_.lower_bound(key);
    if (it == terms_.end() || it->first != key) {
      terms_.emplace_hint(it, key, sign > 0 ? c : -c);
      return;
    }
    if (sign > 0)
      it->second += c;
    else
      it->second -= c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  /// Form degree when homogeneous, -1 for the zero form, throws otherwise.
  int degree() const {
    int deg = -1;
    for (const auto& [k, c] : terms_) {
      const int d = std::popcount(k.mask);
      if (deg >= 0 && d != deg) throw DegreeMismatch("form is not homogeneous");
      deg = d;
    }
    return deg;
  }

  bool is_homogeneous() const {
    try {
      degree();
      return true;
    } catch (const DegreeMismatch&) {
      return false;
    }
  }

  bool is_fiber_free() const {
    const GrassmannMask dx_mask = fiber_generators_mask();
    for (const auto& [k, c] : terms_)
      if ((k.mask & dx_mask) || k.xexp.total() != 0) return false;
    return true;
  }

  GrassmannMask fiber_generators_mask() const {
    return ((GrassmannMask{1} << chart_.fiber_dim) - 1u) << chart_.base_dim;
  }

  ChartForm operator-() const {
    ChartForm out = *this;
    for (auto& [k, c] : out.terms_) c = -c;
    return out;
  }

  ChartForm& operator+=(const ChartForm& o) {
    check_chart(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  ChartForm& operator-=(const ChartForm& o) {
    check_chart(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c, -1);
    return *this;
  }
  ChartForm& operator*=(const Scalar& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  ChartForm& operator*=(const Jet& f) {
    Terms out;
    for (auto& [k, c] : terms_) {
      Jet p = f * c;
      if (!p.is_zero()) out.emplace(k, std::move(p));
    }
    terms_ = std::move(out);
    return *this;
  }

  friend ChartForm operator+(ChartForm a, const ChartForm& b) { return a += b; }
  friend ChartForm operator-(ChartForm a, const ChartForm& b) { return a -= b; }
  friend ChartForm operator*(ChartForm a, const Scalar& s) { return a *= s; }
  friend ChartForm operator*(const Scalar& s, ChartForm a) { return a *= s; }
  friend ChartForm operator*(const Jet& f, ChartForm a) { return a *= f; }

  /// Exterior product; generator reordering contributes the parity sign.
  friend ChartForm wedge(const ChartForm& a, const ChartForm& b) {
    a.check_chart(b);
    ChartForm out(a.chart_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        const int s = merge_sign(ka.mask, kb.mask);
        if (s == 0) continue;
        out.add_term(TermKey{ka.mask | kb.mask, ka.xexp + kb.xexp}, ca * cb, s);
      }
    return out;
  }

  /// Exterior derivative. With `gaussian` set the form is read as
  /// exp(-|x|^2) * (this) and the weight's derivative is included.
  ChartForm exterior_derivative(bool gaussian = false) const {
    ChartForm out(chart_);
    for (const auto& [k, c] : terms_) {
      for (int a = 0; a < chart_.base_dim; ++a) {
        const GrassmannMask g = GrassmannMask{1} << chart_.dt_generator(a);
        const int s = merge_sign(g, k.mask);
        if (s == 0) continue;
        out.add_term(TermKey{k.mask | g, k.xexp}, c.derivative(a), s);
      }
      for (int i = 0; i < chart_.fiber_dim; ++i) {
        const GrassmannMask g = GrassmannMask{1} << chart_.dx_generator(i);
        const int s = merge_sign(g, k.mask);
        if (s == 0) continue;
        const int e = k.xexp[i];
        if (e > 0) out.add_term(TermKey{k.mask | g, k.xexp.shifted(i, -1)}, c * Scalar(static_cast<long>(e)), s);
        if (gaussian) out.add_term(TermKey{k.mask | g, k.xexp.shifted(i, 1)}, c * Scalar(-2), s);
      }
    }
    return out;
  }

  /// Copy with every jet coefficient truncated to `order`.
  ChartForm truncated(int order) const {
    ChartForm out(chart_);
    for (const auto& [k, c] : terms_) out.add_term(k, c.truncated(order));
    return out;
  }

  /// The same form read on another chart with the same base; fiber indices
  /// are kept, so every fiber index used must exist on the target.
  ChartForm on_chart(const Chart& target) const {
    if (target.base_dim != chart_.base_dim || target.order != chart_.order)
      throw DimensionMismatch("rechart requires the same base dimension and order");
    ChartForm out(target);
    for (const auto& [k, c] : terms_) {
      const GrassmannMask dt_part = k.mask & ((GrassmannMask{1} << chart_.base_dim) - 1u);
      const GrassmannMask dx_part = k.mask >> chart_.base_dim;
      if (dx_part >> target.fiber_dim) throw DimensionMismatch("fiber differential missing on target chart");
      for (int i = target.fiber_dim; i < kMaxFiberDim; ++i)
        if (k.xexp[i] != 0) throw DimensionMismatch("fiber variable missing on target chart");
      out.add_term(TermKey{dt_part | (dx_part << target.base_dim), k.xexp}, c);
    }
    return out;
  }

  std::string monomial_name(const TermKey& k) const {
    std::ostringstream os;
    bool any = false;
    for (int g = 0; g < chart_.generator_count(); ++g) {
      if (!(k.mask & (GrassmannMask{1} << g))) continue;
      os << (any ? "^" : "");
      if (g < chart_.base_dim)
        os << "dt" << (g + 1);
      else
        os << "dx" << (g - chart_.base_dim + 1);
      any = true;
    }
    for (int i = 0; i < chart_.fiber_dim; ++i) {
      if (k.xexp[i] == 0) continue;
      os << (any ? " " : "") << "x" << (i + 1);
      if (k.xexp[i] > 1) os << "^" << k.xexp[i];
      any = true;
    }
    return any ? os.str() : "1";
  }

  /// One line per term, in canonical key order.
  std::string to_string() const {
    if (terms_.empty()) return "0\n";
    std::ostringstream os;
    for (const auto& [k, c] : terms_) os << monomial_name(k) << " : " << c.to_string() << "\n";
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const ChartForm& f) { return os << f.to_string(); }

  friend bool operator==(const ChartForm& a, const ChartForm& b) {
    return a.chart_ == b.chart_ && a.terms_ == b.terms_;
  }

 private:
  static void check_fiber_index(const Chart& chart, int i) {
    if (i < 0 || i >= chart.fiber_dim) throw DimensionMismatch("fiber index out of range");
  }

  static ChartForm generator(const Chart& chart, int g) {
    ChartForm out(chart);
    out.add_term(TermKey{GrassmannMask{1} << g, {}}, Jet::constant(chart.base_dim, chart.order, Scalar(1)));
    return out;
  }

  void check_chart(const ChartForm& o) const {
    if (!(chart_ == o.chart_)) throw DimensionMismatch("forms live on different charts");
  }

  Chart chart_;
  Terms terms_;
};

/// First term whose coefficients differ through base degree `order`.
inline std::optional<Witness> first_difference(const ChartForm& a, const ChartForm& b, int order) {
  if (!(a.chart() == b.chart())) return Witness{"<chart>", "chart mismatch", "chart mismatch"};
  const ChartForm diff = a - b;
  for (const auto& [k, c] : diff.terms()) {
    if (c.is_zero_to(order)) continue;
    auto coefficient = [&](const ChartForm& f) {
      auto it = f.terms().find(k);
      return it == f.terms().end() ? std::string("0") : it->second.truncated(order).to_string();
    };
    return Witness{a.monomial_name(k), coefficient(a), coefficient(b)};
  }
  return std::nullopt;
}

inline bool equal_to_order(const ChartForm& a, const ChartForm& b, int order) {
  return !first_difference(a, b, order).has_value();
}

/// exp(-|x|^2) * inner, where |x|^2 runs over every fiber coordinate of the
/// chart. The weight is a type-level marker and never appears in `inner`.
class GaussianChartForm {
 public:
  GaussianChartForm() = default;
  explicit GaussianChartForm(ChartForm inner) : inner_(std::move(inner)) {}

  const ChartForm& inner() const { return inner_; }
  const Chart& chart() const { return inner_.chart(); }
  bool is_zero() const { return inner_.is_zero(); }
  std::size_t term_count() const { return inner_.term_count(); }

  /// With no fiber variables left the weight is identically 1.
  ChartForm without_weight() const {
    if (chart().fiber_dim != 0) throw WeightClash("Gaussian weight still depends on fiber variables");
    return inner_;
  }

  GaussianChartForm operator-() const { return GaussianChartForm(-inner_); }
  friend GaussianChartForm operator+(const GaussianChartForm& a, const GaussianChartForm& b) {
    return GaussianChartForm(a.inner_ + b.inner_);
  }
  friend GaussianChartForm operator-(const GaussianChartForm& a, const GaussianChartForm& b) {
    return GaussianChartForm(a.inner_ - b.inner_);
  }
  friend GaussianChartForm operator*(const Scalar& s, const GaussianChartForm& a) {
    return GaussianChartForm(s * a.inner_);
  }

  GaussianChartForm exterior_derivative() const { return GaussianChartForm(inner_.exterior_derivative(true)); }

  GaussianChartForm truncated(int order) const { return GaussianChartForm(inner_.truncated(order)); }

  std::string to_string() const { return "exp(-|x|^2) *\n" + inner_.to_string(); }

  friend bool operator==(const GaussianChartForm& a, const GaussianChartForm& b) { return a.inner_ == b.inner_; }
  friend std::ostream& operator<<(std::ostream& os, const GaussianChartForm& f) { return os << f.to_string(); }

 private:
  ChartForm inner_;
};

inline GaussianChartForm wedge(const GaussianChartForm& a, const ChartForm& b) {
  return GaussianChartForm(wedge(a.inner(), b));
}
inline GaussianChartForm wedge(const ChartForm& a, const GaussianChartForm& b) {
  return GaussianChartForm(wedge(a, b.inner()));
}
[[noreturn]] inline GaussianChartForm wedge(const GaussianChartForm&, const GaussianChartForm&) {
  throw WeightClash("product of two Gaussian-weighted forms");
}

inline ChartForm exterior_d(const ChartForm& a) { return a.exterior_derivative(false); }
inline GaussianChartForm exterior_d(const GaussianChartForm& a) { return a.exterior_derivative(); }

inline std::optional<Witness> first_difference(const GaussianChartForm& a, const GaussianChartForm& b, int order) {
  return first_difference(a.inner(), b.inner(), order);
}
inline bool equal_to_order(const GaussianChartForm& a, const GaussianChartForm& b, int order) {
  return equal_to_order(a.inner(), b.inner(), order);
}

// ---------------------------------------------------------------------------
// Fiber-linear substitution x_old = M(t) x_new.
// ---------------------------------------------------------------------------

namespace detail {

inline ChartForm substitute_terms(const ChartForm& a, const JetMatrix& m, const Chart& target) {
  const Chart& src = a.chart();
  if (static_cast<int>(m.rows()) != src.fiber_dim || static_cast<int>(m.cols()) != target.fiber_dim)
    throw DimensionMismatch("frame shape does not match the charts' fiber dimensions");
  if (m.base_dim() != src.base_dim || target.base_dim != src.base_dim || m.order() != src.order ||
      target.order != src.order)
    throw DimensionMismatch("frame and charts must share base dimension and order");

  // Images of x_old_i and dx_old_i on the target chart.
  std::vector<ChartForm> x_img, dx_img;
  for (int i = 0; i < src.fiber_dim; ++i) {
    ChartForm xi(target), dxi(target);
    for (int j = 0; j < target.fiber_dim; ++j) {
      const Jet& mij = m(i, j);
      if (mij.is_zero()) continue;
      const ChartForm xj = ChartForm::x(target, j);
      xi += mij * xj;
      dxi += mij * ChartForm::dx(target, j);
      for (int b = 0; b < src.base_dim; ++b) dxi += wedge(mij.derivative(b) * ChartForm::dt(target, b), xj);
    }
    x_img.push_back(std::move(xi));
    dx_img.push_back(std::move(dxi));
  }

  std::map<FiberExponent, ChartForm> x_cache;
  std::map<GrassmannMask, ChartForm> dx_cache;
  auto x_power = [&](const FiberExponent& e) -> const ChartForm& {
    auto it = x_cache.find(e);
    if (it != x_cache.end()) return it->second;
    ChartForm p = ChartForm::one(target);
    for (int i = 0; i < src.fiber_dim; ++i)
      for (int k = 0; k < e[i]; ++k) p = wedge(p, x_img[i]);
    return x_cache.emplace(e, std::move(p)).first->second;
  };
  auto dx_product = [&](GrassmannMask fiber_bits) -> const ChartForm& {
    auto it = dx_cache.find(fiber_bits);
    if (it != dx_cache.end()) return it->second;
    ChartForm p = ChartForm::one(target);
    for (int i = 0; i < src.fiber_dim; ++i)
      if (fiber_bits & (GrassmannMask{1} << i)) p = wedge(p, dx_img[i]);
    return dx_cache.emplace(fiber_bits, std::move(p)).first->second;
  };

  ChartForm out(target);
  const GrassmannMask dt_mask = (GrassmannMask{1} << src.base_dim) - 1u;
  for (const auto& [k, c] : a.terms()) {
    // canonical order puts every dt before every dx
    ChartForm dt_part(target);
    dt_part.add_term(TermKey{k.mask & dt_mask, {}}, c);
    ChartForm term = wedge(wedge(dt_part, x_power(k.xexp)), dx_product(k.mask >> src.base_dim));
    out += term;
  }
  return out;
}

}  // namespace detail

/// Pullback along x_old = M x_new, dx_old = (dM) x_new + M dx_new.
inline ChartForm substitute_fiber_frame(const ChartForm& a, const JetMatrix& m, const Chart& target) {
  return detail::substitute_terms(a, m, target);
}

/// Gaussian variant; the weight is carried over only when M^T M == 1.
inline GaussianChartForm substitute_fiber_frame(const GaussianChartForm& a, const JetMatrix& m, const Chart& target) {
  if (m.rows() < m.cols() || !m.has_orthonormal_columns())
    throw WeightNotPreserved("substitution frame is not isometric; Gaussian weight would change");
  return GaussianChartForm(detail::substitute_terms(a.inner(), m, target));
}

}  // namespace mqthom
