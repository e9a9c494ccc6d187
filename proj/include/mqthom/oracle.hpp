#pragma once

// Floating-point cross-check of the exact engine: jets are evaluated at a
// concrete base point and fiber integrals are computed by Gauss-Hermite
// quadrature. Nothing here feeds back into the exact computations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"

namespace mqthom::oracle {

struct NumericForm {
  Chart chart;
  bool gaussian = false;  // implicit exp(-|x|^2) over all fiber coordinates
  std::map<TermKey, double> terms;

  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, v] : terms) m = std::max(m, std::abs(v));
    return m;
  }
};

inline NumericForm evaluate_at(const ChartForm& a, const std::vector<double>& point, int order, bool gaussian = false) {
  if (static_cast<int>(point.size()) != a.chart().base_dim) throw DimensionMismatch("base point has wrong dimension");
  NumericForm out{a.chart(), gaussian, {}};
  for (const auto& [k, c] : a.terms()) {
    const double v = c.evaluate(point, order);
    if (v != 0.0) out.terms[k] += v;
  }
  return out;
}

inline NumericForm evaluate_at(const ChartForm& a, const std::vector<Rational>& point, int order) {
  std::vector<double> p;
  for (const auto& r : point) p.push_back(r.get_d());
  return evaluate_at(a, p, order);
}

inline NumericForm evaluate_at(const GaussianChartForm& a, const std::vector<Rational>& point, int order) {
  std::vector<double> p;
  for (const auto& r : point) p.push_back(r.get_d());
  return evaluate_at(a.inner(), p, order, true);
}

/// Nodes and weights of the q-point Gauss-Hermite rule for weight exp(-x^2).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermiteRule gauss_hermite(int q) {
  if (q < 1) throw DimensionMismatch("Gauss-Hermite rule needs at least one node");
  constexpr double kEps = 1.0e-15;
  constexpr int kMaxIt = 200;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  GaussHermiteRule rule{std::vector<double>(q), std::vector<double>(q)};
  const int half = (q + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * q + 1.0) - 1.85575 * std::pow(2.0 * q + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(q), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[1];
    else
      z = 2.0 * z - rule.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < kMaxIt; ++it) {
      // orthonormal Hermite recurrence
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < q; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * q) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[q - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[q - 1 - i] = rule.weights[i];
  }
  return rule;
}

inline int default_node_count(const NumericForm& a) {
  int max_deg = 0;
  for (const auto& [k, v] : a.terms)
    for (int i = 0; i < a.chart.fiber_dim; ++i) max_deg = std::max(max_deg, k.xexp[i]);
  return max_deg / 2 + 2;
}

namespace detail {

// Sign of reordering the generator list `from` into `to` by adjacent swaps.
inline int reorder_sign(std::vector<int> from, const std::vector<int>& to) {
  int swaps = 0;
  for (std::size_t pos = 0; pos < to.size(); ++pos) {
    std::size_t j = pos;
    while (from[j] != to[pos]) ++j;
    for (; j > pos; --j) {
      std::swap(from[j], from[j - 1]);
      ++swaps;
    }
  }
  return swaps % 2 ? -1 : 1;
}

}  // namespace detail

/// Tensor-product Gauss-Hermite integration over the fiber coordinates in
/// `integrated`, whose differentials are placed last in `orientation` order.
/// A rule too small for exactness is reported on stderr and enlarged.
inline NumericForm quad_fiber_integrate(const NumericForm& a, const std::vector<int>& integrated,
                                        const std::vector<int>& orientation, int q = 0) {
  if (!a.gaussian) throw WeightClash("quadrature oracle needs a Gaussian-weighted form");
  const Chart& chart = a.chart;
  int max_deg = 0;
  for (const auto& [k, v] : a.terms)
    for (int h : integrated) max_deg = std::max(max_deg, k.xexp[h]);
  if (q <= 0) q = default_node_count(a);
  if (2 * q - 1 < max_deg) {
    const int raised = max_deg / 2 + 1;
    std::cerr << "warning: " << q << " Gauss-Hermite nodes cannot integrate degree " << max_deg
              << " exactly; using " << raised << "\n";
    q = raised;
  }
  const GaussHermiteRule rule = gauss_hermite(q);
  auto axis_sum = [&](int power) {
    double s = 0.0;
    for (int i = 0; i < q; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], power);
    return s;
  };

  std::vector<int> remaining;
  for (int i = 0; i < chart.fiber_dim; ++i)
    if (std::find(integrated.begin(), integrated.end(), i) == integrated.end()) remaining.push_back(i);
  std::vector<int> orient;
  for (int i : chart.orientation)
    if (std::find(remaining.begin(), remaining.end(), i) != remaining.end())
      orient.push_back(static_cast<int>(std::find(remaining.begin(), remaining.end(), i) - remaining.begin()));
  NumericForm out{Chart(chart.base_dim, static_cast<int>(remaining.size()), 0, chart.order, orient),
                  !remaining.empty(), {}};

  for (const auto& [k, v] : a.terms) {
    std::vector<int> gens;
    for (int g = 0; g < chart.generator_count(); ++g)
      if (k.mask & (GrassmannMask{1} << g)) gens.push_back(g);
    bool complete = true;
    for (int h : integrated)
      if (std::find(gens.begin(), gens.end(), chart.dx_generator(h)) == gens.end()) complete = false;
    if (!complete) continue;

    std::vector<int> target;
    for (int g : gens) {
      const bool is_integrated =
          g >= chart.base_dim &&
          std::find(integrated.begin(), integrated.end(), g - chart.base_dim) != integrated.end();
      if (!is_integrated) target.push_back(g);
    }
    for (int h : orientation) target.push_back(chart.dx_generator(h));
    const int sign = detail::reorder_sign(gens, target);

    double value = sign * v;
    for (int h : integrated) value *= axis_sum(k.xexp[h]);

    TermKey key;
    for (int g = 0; g < chart.base_dim; ++g)
      if (k.mask & (GrassmannMask{1} << g)) key.mask |= GrassmannMask{1} << g;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const int i = remaining[r];
      if (k.mask & (GrassmannMask{1} << chart.dx_generator(i)))
        key.mask |= GrassmannMask{1} << (chart.base_dim + static_cast<int>(r));
      key.xexp.e[r] = k.xexp.e[i];
    }
    out.terms[key] += value;
  }
  return out;
}

inline NumericForm quad_fiber_integrate(const NumericForm& a, const std::vector<int>& integrated, int q = 0) {
  std::vector<int> sorted = integrated;
  std::sort(sorted.begin(), sorted.end());
  return quad_fiber_integrate(a, sorted, sorted, q);
}

/// First term whose values differ by more than rel_tol * max(1, |a|, |b|).
inline std::optional<Witness> numeric_difference(const NumericForm& a, const NumericForm& b, double rel_tol) {
  std::map<TermKey, std::pair<double, double>> joined;
  for (const auto& [k, v] : a.terms) joined[k].first = v;
  for (const auto& [k, v] : b.terms) joined[k].second = v;
  for (const auto& [k, p] : joined) {
    const double scale = std::max({1.0, std::abs(p.first), std::abs(p.second)});
    if (std::abs(p.first - p.second) > rel_tol * scale) {
      std::ostringstream l, r;
      l.precision(17);
      r.precision(17);
      l << p.first;
      r << p.second;
      return Witness{ChartForm(a.chart).monomial_name(k), l.str(), r.str()};
    }
  }
  return std::nullopt;
}

}  // namespace mqthom::oracle
