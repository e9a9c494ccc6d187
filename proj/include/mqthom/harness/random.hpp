#pragma once

#include <cstdint>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/jet.hpp"
#include "mqthom/jet_matrix.hpp"
#include "mqthom/matforms.hpp"

namespace mqthom::harness {

/// Counter-based generator: the k-th draw is a pure function of
/// (seed, stream, k), so instances never depend on call history elsewhere.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed * 0x9E3779B97F4A7C15ull ^ mix(stream + 1))) {}

  std::uint64_t at(std::uint64_t counter) const { return mix(key_ + counter * 0xD1B54A32D192ED03ull); }
  std::uint64_t next() { return at(counter_++); }

  /// Uniform integer in [lo, hi].
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// numerator in [-3, 3], denominator in {1, 2, 3}
  Rational small_rational() {
    const long num = uniform(-3, 3);
    const long den = uniform(1, 3);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline Jet random_jet(CounterRng& rng, int base_dim, int order) {
  Jet f(base_dim, order);
  for (std::size_t i = 0; i < f.size(); ++i) f.set_coeff(i, Scalar(rng.small_rational()));
  return f;
}

/// Skew jet matrix with small random rational coefficients. Seed 0 is the
/// flat sentinel and yields the zero matrix.
inline JetMatrix random_skew_jet(std::size_t dim, int base_dim, int order, std::uint64_t seed,
                                 std::uint64_t stream = 0) {
  JetMatrix s(dim, dim, base_dim, order);
  if (seed == 0) return s;
  CounterRng rng(seed, stream);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      Jet f = random_jet(rng, base_dim, order);
      s(j, i) = -f;
      s(i, j) = std::move(f);
    }
  return s;
}

/// Skew matrix of base 1-forms sum_a f_ija dt_a on `chart`; seed 0 gives zero.
inline FormMatrix random_skew_one_forms(std::size_t dim, const Chart& chart, std::uint64_t seed,
                                        std::uint64_t stream = 0) {
  FormMatrix theta(dim, dim, chart);
  if (seed == 0) return theta;
  CounterRng rng(seed, stream);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      ChartForm f(chart);
      for (int a = 0; a < chart.base_dim; ++a)
        f += random_jet(rng, chart.base_dim, chart.order) * ChartForm::dt(chart, a);
      theta(j, i) = -f;
      theta(i, j) = std::move(f);
    }
  return theta;
}

/// (xi_1, xi_2) = ((1 - u^2), 2u) / (1 + u^2), so xi_1^2 + xi_2^2 = 1 exactly.
inline std::vector<Jet> partition_of_unity_from(const Jet& u) {
  const Jet one = Jet::constant(u.base_dim(), u.order(), Scalar(1));
  const Jet u2 = u * u;
  const Jet inv = (one + u2).inverse();
  return {(one - u2) * inv, Scalar(2) * (u * inv)};
}

/// Random quadratic partition of unity with s = 2 summands; seed 0 gives (1, 0).
inline std::vector<Jet> random_partition_of_unity(int s, int base_dim, int order, std::uint64_t seed,
                                                  std::uint64_t stream = 0) {
  if (s != 2) throw Unsupported("quadratic partitions of unity are generated for s = 2 only");
  if (seed == 0) return partition_of_unity_from(Jet(base_dim, order));
  CounterRng rng(seed, stream);
  return partition_of_unity_from(random_jet(rng, base_dim, order));
}

}  // namespace mqthom::harness
