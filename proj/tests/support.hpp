#pragma once

#include <cstdint>
#include <vector>

#include "mqthom/mqthom.hpp"
#include "mqthom/harness/random.hpp"
#include "mqthom/harness/scenarios.hpp"

namespace mqthom::testing {

inline Jet cst(int d, int k, long num, long den = 1) { return Jet::constant(d, k, Scalar::fraction(num, den)); }

inline Jet tvar(int d, int k, int a) { return Jet::variable(d, k, a); }

inline Jet rand_jet(std::uint64_t seed, int d, int k, std::uint64_t stream = 0) {
  harness::CounterRng rng(seed, stream);
  return harness::random_jet(rng, d, k);
}

/// Random jet with constant term 1.
inline Jet rand_unit_jet(std::uint64_t seed, int d, int k, std::uint64_t stream = 0) {
  Jet f = rand_jet(seed, d, k, stream);
  f.set_coeff(0, Scalar(1));
  return f;
}

/// Random homogeneous form of degree `deg` built from random jets, a few
/// fiber monomials and wedges of generators.
inline ChartForm rand_form(const Chart& c, int deg, std::uint64_t seed, std::uint64_t stream = 0) {
  harness::CounterRng rng(seed, stream);
  ChartForm out(c);
  const int gens = c.generator_count();
  for (int term = 0; term < 4; ++term) {
    ChartForm t = ChartForm::function(c, harness::random_jet(rng, c.base_dim, c.order));
    for (int i = 0; i < c.fiber_dim; ++i)
      if (rng.uniform(0, 2) == 0) t = wedge(t, ChartForm::x(c, i));
    int placed = 0;
    for (int g = 0; g < gens && placed < deg; ++g) {
      if (rng.uniform(0, 1) == 0 && gens - g > deg - placed) continue;
      t = wedge(t, g < c.base_dim ? ChartForm::dt(c, g) : ChartForm::dx(c, g - c.base_dim));
      ++placed;
    }
    if (placed == deg) out += t;
  }
  return out;
}

inline ChartForm top_dx(const Chart& c) {
  ChartForm top = ChartForm::one(c);
  for (int i = 0; i < c.fiber_dim; ++i) top = wedge(top, ChartForm::dx(c, i));
  return top;
}

inline JetMatrix constant_matrix(const std::vector<std::vector<Rational>>& rows, int d, int k) {
  JetMatrix m(rows.size(), rows.front().size(), d, k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = Jet::constant(d, k, Scalar(rows[i][j]));
  return m;
}

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace mqthom::testing
