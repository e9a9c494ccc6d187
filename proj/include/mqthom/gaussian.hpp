#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/jet_matrix.hpp"
#include "mqthom/mutation.hpp"
#include "mqthom/scalar.hpp"

namespace mqthom {

/// Integral over R of exp(-x^2) x^k: zero for odd k, (k-1)!! pi^(1/2) / 2^(k/2)
/// for even k.
inline Scalar gaussian_moment(int k) {
  if (k < 0) throw DimensionMismatch("negative moment order");
  if (k % 2 == 1) return Scalar();
  mpz_class num = 1;
  for (int j = k - 1; j > 1; j -= 2) num *= j;
  mpz_class den = 1;
  den <<= static_cast<unsigned>(k / 2);
  Rational r(num, den);
  r.canonicalize();
  return Scalar::pi_power(1, r);
}

/// Rows b_1..b_s of length l for the integral of exp(-z^2) (b_1^T z)...(b_s^T z)
/// over R^l. Entries are chart forms of one common degree, 0 or 1.
struct WickInput {
  int l = 0;
  Chart chart;
  std::vector<std::vector<ChartForm>> rows;

  /// Common degree of the nonzero entries (0 when all vanish).
  int entry_degree() const {
    int deg = -1;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != l) throw DimensionMismatch("Wick row has wrong length");
      for (const auto& e : row) {
        if (!(e.chart() == chart)) throw DimensionMismatch("Wick entry lives on another chart");
        if (e.is_zero()) continue;
        const int d = e.degree();
        if (d > 1) throw DegreeMismatch("Wick entries must be functions or 1-forms");
        if (deg >= 0 && d != deg) throw DegreeMismatch("Wick rows mix scalar and 1-form entries");
        deg = d;
      }
    }
    return deg < 0 ? 0 : deg;
  }
};

namespace detail {

inline ChartForm dot(const std::vector<ChartForm>& a, const std::vector<ChartForm>& b, const Chart& chart) {
  ChartForm out(chart);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!a[k].is_zero() && !b[k].is_zero()) out += wedge(a[k], b[k]);
  return out;
}

inline Rational factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

}  // namespace detail

/// Wick formula: pi^(l/2) / (2^s (s/2)!) * sum over permutations of the
/// products of pairwise contractions b_sigma(1)^T b_sigma(2) ...; the
/// permutation sign is inserted when the rows are 1-form valued.
inline ChartForm wick(const WickInput& in) {
  const int degree = in.entry_degree();
  const int s = static_cast<int>(in.rows.size());
  ChartForm out(in.chart);
  if (s % 2 == 1) return out;

  std::vector<std::vector<ChartForm>> contraction(s, std::vector<ChartForm>(s, ChartForm(in.chart)));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) contraction[i][j] = detail::dot(in.rows[i], in.rows[j], in.chart);

  const bool signed_sum = degree == 1 && current_mutation() != Mutation::wick_sigma_sign;
  std::vector<int> sigma(static_cast<std::size_t>(s));
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    ChartForm term = ChartForm::one(in.chart);
    for (int p = 0; p + 1 < s && !term.is_zero(); p += 2) term = wedge(term, contraction[sigma[p]][sigma[p + 1]]);
    if (signed_sum && permutation_sign(sigma) < 0)
      out -= term;
    else
      out += term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  mpz_class two_s = 1;
  two_s <<= static_cast<unsigned>(s);
  Rational prefactor = 1 / (Rational(two_s) * detail::factorial(s / 2));
  prefactor.canonicalize();
  return Scalar::pi_power(in.l, prefactor) * out;
}

/// Reference route for the same integral: expand the product into fiber
/// monomials in z and integrate each by one-dimensional moments.
inline ChartForm wick_direct(const WickInput& in) {
  in.entry_degree();
  using Exponent = std::vector<int>;
  std::map<Exponent, ChartForm> expansion;
  expansion.emplace(Exponent(static_cast<std::size_t>(in.l), 0), ChartForm::one(in.chart));
  for (const auto& row : in.rows) {
    std::map<Exponent, ChartForm> next;
    for (const auto& [e, c] : expansion)
      for (int k = 0; k < in.l; ++k) {
        if (row[k].is_zero()) continue;
        Exponent raised = e;
        ++raised[k];
        auto [it, inserted] = next.try_emplace(raised, ChartForm(in.chart));
        it->second += wedge(c, row[k]);
      }
    expansion = std::move(next);
  }
  ChartForm out(in.chart);
  for (const auto& [e, c] : expansion) {
    Scalar weight(1);
    for (int k = 0; k < in.l && !weight.is_zero(); ++k) weight *= gaussian_moment(e[k]);
    if (!weight.is_zero()) out += weight * c;
  }
  return out;
}

/// Chart left after integrating out the fiber indices in `integrated`.
inline Chart reduced_chart(const Chart& chart, const std::vector<int>& integrated) {
  std::vector<int> renumber(static_cast<std::size_t>(chart.fiber_dim), -1);
  int next = 0, split = 0;
  for (int i = 0; i < chart.fiber_dim; ++i) {
    if (std::find(integrated.begin(), integrated.end(), i) != integrated.end()) continue;
    if (i < chart.fiber_split) ++split;
    renumber[i] = next++;
  }
  std::vector<int> orientation;
  for (int i : chart.orientation)
    if (renumber[i] >= 0) orientation.push_back(renumber[i]);
  return Chart(chart.base_dim, next, split, chart.order, orientation);
}

/// Push-forward along the fiber coordinates `integrated` (Berezin extraction
/// plus Gaussian moments). Each monomial is rewritten as
/// (residual) ^ dx_{o_1} ^ ... ^ dx_{o_m} with o = `orientation`, and only
/// monomials carrying every integrated differential survive. The result keeps
/// the weight over the remaining fiber coordinates; when none remain the
/// weight is identically 1.
inline GaussianChartForm fiber_integrate(const GaussianChartForm& a, const std::vector<int>& integrated,
                                         const std::vector<int>& orientation) {
  const Chart& chart = a.chart();
  std::vector<int> sorted = integrated;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DimensionMismatch("repeated fiber index in integration set");
  for (int h : sorted)
    if (h < 0 || h >= chart.fiber_dim) throw DimensionMismatch("integration index outside the fiber");
  {
    std::vector<int> o = orientation;
    std::sort(o.begin(), o.end());
    if (o != sorted) throw DimensionMismatch("orientation must order exactly the integrated indices");
  }

  const Chart target = reduced_chart(chart, sorted);
  std::vector<int> renumber(static_cast<std::size_t>(chart.fiber_dim), -1);
  for (int i = 0, next = 0; i < chart.fiber_dim; ++i)
    if (!std::binary_search(sorted.begin(), sorted.end(), i)) renumber[i] = next++;

  // dx_sorted = sign(orientation) * dx_o
  std::vector<int> oriented_positions;
  for (int h : orientation) oriented_positions.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), h) - sorted.begin()));
  const int orientation_sign = permutation_sign(oriented_positions);

  GrassmannMask h_mask = 0;
  for (int h : sorted) h_mask |= GrassmannMask{1} << chart.dx_generator(h);

  ChartForm out(target);
  for (const auto& [k, c] : a.inner().terms()) {
    if ((k.mask & h_mask) != h_mask) continue;
    const GrassmannMask residual = k.mask & ~h_mask;
    int sign = merge_sign(residual, h_mask) * orientation_sign;
    if (current_mutation() == Mutation::berezin_parity) sign = -sign;

    Scalar weight(1);
    for (int h : sorted) {
      weight *= gaussian_moment(k.xexp[h]);
      if (weight.is_zero()) break;
    }
    if (weight.is_zero()) continue;

    TermKey key;
    for (int g = 0; g < chart.base_dim; ++g)
      if (residual & (GrassmannMask{1} << g)) key.mask |= GrassmannMask{1} << target.dt_generator(g);
    for (int i = 0; i < chart.fiber_dim; ++i) {
      if (renumber[i] < 0) continue;
      if (residual & (GrassmannMask{1} << chart.dx_generator(i)))
        key.mask |= GrassmannMask{1} << target.dx_generator(renumber[i]);
      key.xexp.e[renumber[i]] = k.xexp.e[i];
    }
    out.add_term(key, c * weight, sign);
  }
  return GaussianChartForm(std::move(out));
}

/// Integration set taken in increasing index order.
inline GaussianChartForm fiber_integrate(const GaussianChartForm& a, const std::vector<int>& integrated) {
  std::vector<int> sorted = integrated;
  std::sort(sorted.begin(), sorted.end());
  return fiber_integrate(a, sorted, sorted);
}

/// Integrates out the last `count` fiber coordinates.
inline GaussianChartForm fiber_integrate_last(const GaussianChartForm& a, int count) {
  std::vector<int> h(static_cast<std::size_t>(count));
  std::iota(h.begin(), h.end(), a.chart().fiber_dim - count);
  return fiber_integrate(a, h);
}

/// Push-forward onto the span of the first `keep` columns of the orthogonal
/// frame R, along the span of the remaining columns. The result is expressed
/// in the coordinates of the kept frame columns.
inline GaussianChartForm fiber_integrate_rotated(const GaussianChartForm& a, const OrthoJetMatrix& r, int keep) {
  const Chart& chart = a.chart();
  if (!r.is_square() || static_cast<int>(r.rows()) != chart.fiber_dim)
    throw DimensionMismatch("rotation frame must be square of fiber size");
  if (keep < 0 || keep > chart.fiber_dim) throw DimensionMismatch("keep out of range");
  const Chart frame_chart(chart.base_dim, chart.fiber_dim, keep, chart.order);
  const GaussianChartForm rotated = substitute_fiber_frame(a, r.matrix(), frame_chart);
  return fiber_integrate_last(rotated, chart.fiber_dim - keep);
}

/// Pullback along an isometric inclusion x_big = iota(t) x_small.
inline ChartForm pullback_inclusion(const ChartForm& a, const JetMatrix& iota) {
  const Chart target(a.chart().base_dim, static_cast<int>(iota.cols()), static_cast<int>(iota.cols()), a.chart().order);
  return substitute_fiber_frame(a, iota, target);
}

inline GaussianChartForm pullback_inclusion(const GaussianChartForm& a, const JetMatrix& iota) {
  const Chart target(a.chart().base_dim, static_cast<int>(iota.cols()), static_cast<int>(iota.cols()), a.chart().order);
  return substitute_fiber_frame(a, iota, target);
}

}  // namespace mqthom
