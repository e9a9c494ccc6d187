#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/gaussian.hpp"
#include "mqthom/matforms.hpp"
#include "mqthom/mutation.hpp"

namespace mqthom {

/// Parity of the shuffle that lists `first` (increasing) before `rest`
/// (increasing), for a disjoint cover of {0, ..., n-1}.
inline int split_sign(const std::vector<int>& first, const std::vector<int>& rest) {
  std::vector<int> seq = first;
  seq.insert(seq.end(), rest.begin(), rest.end());
  std::vector<int> sorted = seq;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) throw InvalidSplit("split is not a disjoint cover of {0..n-1}");
  if (!std::is_sorted(first.begin(), first.end()) || !std::is_sorted(rest.begin(), rest.end()))
    throw InvalidSplit("split parts must be increasing");
  if (current_mutation() == Mutation::split_sign) return 1;
  return permutation_sign(seq);
}

struct SubsetSplit {
  int n = 0;
  std::vector<int> first;  // I
  std::vector<int> rest;   // I'
  int sign = 1;
};

/// All splits I u I' = {0..n-1} with |I'| even, ordered by the bit pattern
/// of I'.
inline std::vector<SubsetSplit> even_splits(int n) {
  std::vector<SubsetSplit> out;
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    if (std::popcount(bits) % 2 != 0) continue;
    SubsetSplit s;
    s.n = n;
    for (int i = 0; i < n; ++i) (bits & (1u << i) ? s.rest : s.first).push_back(i);
    s.sign = split_sign(s.first, s.rest);
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline Rational pfaffian_normalization(std::size_t k) {
  mpz_class den = 1;
  den <<= static_cast<unsigned>(k);
  for (std::size_t i = 2; i <= k / 2; ++i) den *= static_cast<unsigned long>(i);
  return Rational(1, 1) / Rational(den);
}

inline ChartForm pfaffian_expand(const FormMatrix& omega, std::vector<int> idx) {
  if (idx.empty()) return ChartForm::one(omega.chart());
  ChartForm out(omega.chart());
  const int head = idx.front();
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const ChartForm& entry = omega(head, idx[j]);
    if (entry.is_zero()) continue;
    std::vector<int> rest;
    for (std::size_t r = 1; r < idx.size(); ++r)
      if (r != j) rest.push_back(idx[r]);
    const ChartForm minor = pfaffian_expand(omega, rest);
    if (j % 2 == 1)
      out += wedge(entry, minor);
    else
      out -= wedge(entry, minor);
  }
  return out;
}

inline void check_pfaffian_args(const FormMatrix& omega, const std::vector<int>& idx) {
  if (idx.size() % 2 != 0) throw InvalidSplit("Pfaffian factor needs an even index set");
  for (int i : idx)
    if (i < 0 || i >= static_cast<int>(omega.rows()) || omega.rows() != omega.cols())
      throw DimensionMismatch("Pfaffian index out of range");
}

}  // namespace detail

/// 1/(2^k (k/2)!) sum_sigma (-1)^sigma Omega_{i'_sigma(1) i'_sigma(2)} ...,
/// taken literally over all k! permutations.
inline ChartForm pfaffian_factor_perm(const FormMatrix& omega, const std::vector<int>& idx) {
  detail::check_pfaffian_args(omega, idx);
  const std::size_t k = idx.size();
  ChartForm sum(omega.chart());
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    ChartForm term = ChartForm::one(omega.chart());
    for (std::size_t p = 0; p + 1 < k && !term.is_zero(); p += 2)
      term = wedge(term, omega(idx[sigma[p]], idx[sigma[p + 1]]));
    if (permutation_sign(sigma) < 0)
      sum -= term;
    else
      sum += term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return Scalar(detail::pfaffian_normalization(k)) * sum;
}

/// Same quantity via first-row expansion of the Pfaffian of Omega restricted
/// to `idx`, scaled by 2^(-k/2).
inline ChartForm pfaffian_factor_recursive(const FormMatrix& omega, const std::vector<int>& idx) {
  detail::check_pfaffian_args(omega, idx);
  mpz_class den = 1;
  den <<= static_cast<unsigned>(idx.size() / 2);
  return Scalar(Rational(1) / Rational(den)) * detail::pfaffian_expand(omega, idx);
}

inline constexpr std::size_t kMaxPermutationPfaffian = 8;

inline constexpr std::size_t kCrossCheckedPfaffian = 6;

/// Permutation sum up to |I'| = 8, recursive expansion beyond; both are
/// computed and compared up to |I'| = 6. The comparison stops below the top
/// order, where a curvature assembled from derivatives need not be skew.
inline ChartForm pfaffian_factor(const FormMatrix& omega, const std::vector<int>& idx) {
  if (idx.size() > kMaxPermutationPfaffian) return pfaffian_factor_recursive(omega, idx);
  ChartForm perm = pfaffian_factor_perm(omega, idx);
  const int order = std::max(omega.chart().order - 1, 0);
  if (idx.size() <= kCrossCheckedPfaffian && !equal_to_order(perm, pfaffian_factor_recursive(omega, idx), order))
    throw Error("Pfaffian permutation sum and recursive expansion disagree");
  return perm;
}

/// (dx + theta x)_i for i = 0..n-1 on `chart`.
inline std::vector<ChartForm> covariant_fiber_differentials(const Chart& chart, const FormMatrix& theta) {
  const int n = chart.fiber_dim;
  std::vector<ChartForm> out;
  for (int i = 0; i < n; ++i) {
    ChartForm f = ChartForm::dx(chart, i);
    for (int j = 0; j < n; ++j)
      if (!theta(i, j).is_zero()) f += wedge(theta(i, j), ChartForm::x(chart, j));
    out.push_back(std::move(f));
  }
  return out;
}

/// Mathai-Quillen Thom form
///   pi^(-n/2) e^(-x^2) sum_{|I'| even} (-1)^(I,I') (dx+theta x)_I Pf-factor(Omega, I')
/// for connection matrix theta and curvature omega (n x n, fiber free).
inline GaussianChartForm mq_form(const Chart& chart, const FormMatrix& theta, const FormMatrix& omega) {
  const auto n = static_cast<std::size_t>(chart.fiber_dim);
  if (theta.rows() != n || theta.cols() != n || omega.rows() != n || omega.cols() != n)
    throw DimensionMismatch("connection and curvature must be fiber_dim x fiber_dim");
  const FormMatrix th = theta.on_chart(chart);
  const FormMatrix om = omega.on_chart(chart);
  const auto factors = covariant_fiber_differentials(chart, th);

  ChartForm sum(chart);
  for (const auto& split : even_splits(chart.fiber_dim)) {
    ChartForm term = ChartForm::one(chart);
    for (int i : split.first) term = wedge(term, factors[i]);
    if (term.is_zero()) continue;
    term = wedge(term, pfaffian_factor(om, split.rest));
    if (split.sign < 0)
      sum -= term;
    else
      sum += term;
  }
  return GaussianChartForm(Scalar::pi_power(-chart.fiber_dim) * sum);
}

}  // namespace mqthom
