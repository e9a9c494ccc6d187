#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "mqthom/error.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/gaussian.hpp"
#include "mqthom/harness/random.hpp"
#include "mqthom/jet_matrix.hpp"
#include "mqthom/matforms.hpp"
#include "mqthom/mq.hpp"
#include "mqthom/oracle.hpp"

namespace mqthom::harness {

enum class ScenarioId {
  theorem_nat,
  theorem_res,
  closedness,
  normalization,
  lemma_nat,
  lemma_part,
  theorem_patch,
  wick_crosscheck,
};

inline const std::vector<std::pair<ScenarioId, std::string>>& scenario_names() {
  static const std::vector<std::pair<ScenarioId, std::string>> names = {
      {ScenarioId::theorem_nat, "theorem-nat"},     {ScenarioId::theorem_res, "theorem-res"},
      {ScenarioId::closedness, "closedness"},       {ScenarioId::normalization, "normalization"},
      {ScenarioId::lemma_nat, "lemma-nat"},         {ScenarioId::lemma_part, "lemma-part"},
      {ScenarioId::theorem_patch, "theorem-patch"}, {ScenarioId::wick_crosscheck, "wick-crosscheck"},
  };
  return names;
}

inline std::string to_string(ScenarioId id) {
  for (const auto& [k, v] : scenario_names())
    if (k == id) return v;
  return "unknown";
}

inline std::optional<ScenarioId> parse_scenario(const std::string& name) {
  for (const auto& [k, v] : scenario_names())
    if (v == name) return k;
  return std::nullopt;
}

struct ScenarioSpec {
  ScenarioId id = ScenarioId::theorem_nat;
  int n = 1;
  int m = 1;
  int d = 1;   // base dimension
  int K = 2;   // truncation order
  int s = 2;   // summands (patching) or Wick rows
  std::uint64_t seed = 1;
  std::optional<int> compare_order;
  bool oracle = true;
  int oracle_points = 3;
};

/// K for substitution-only and algebraic identities, K-1 for one derivative,
/// K-2 for two.
inline int default_compare_order(const ScenarioSpec& spec) {
  switch (spec.id) {
    case ScenarioId::normalization:
    case ScenarioId::wick_crosscheck: return spec.K;
    default: return spec.K - 1;
  }
}

enum class Verdict { pass, fail, sign_discrepancy };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::sign_discrepancy: return "sign-discrepancy";
  }
  return "fail";
}

inline std::ostream& operator<<(std::ostream& os, Verdict v) { return os << to_string(v); }
inline std::ostream& operator<<(std::ostream& os, ScenarioId id) { return os << to_string(id); }

struct OracleSummary {
  bool ran = false;
  bool agreed = true;
  int points = 0;
  double max_rel_err = 0.0;
  std::optional<Witness> witness;
};

struct VerificationReport {
  ScenarioSpec spec;
  int compare_order = 0;
  Verdict verdict = Verdict::pass;
  std::string failed_check;
  std::optional<Witness> witness;
  double elapsed_ms = 0.0;
  std::map<std::string, std::size_t> term_counts;
  OracleSummary oracle;
  std::string error;  // set when the run threw
};

namespace detail {

/// Collects the outcome of the individual checks of one scenario run. The
/// first mismatch wins. With `allow_sign_discrepancy`, an exact negation is
/// recorded as a sign discrepancy unless a genuine mismatch also occurs.
class CheckLog {
 public:
  explicit CheckLog(VerificationReport& report, bool allow_sign_discrepancy = false)
      : report_(report), allow_sign_(allow_sign_discrepancy) {}

  template <typename Form>
  void exact(const std::string& name, const Form& lhs, const Form& rhs, int order) {
    auto w = first_difference(lhs, rhs, order);
    if (!w) return;
    if (allow_sign_ && !first_difference(lhs, -rhs, order)) {
      if (report_.verdict == Verdict::pass) record(Verdict::sign_discrepancy, name, *w);
      return;
    }
    if (report_.verdict != Verdict::fail) record(Verdict::fail, name, *w);
  }

  void jets(const std::string& name, const JetMatrix& lhs, const JetMatrix& rhs, int order) {
    for (std::size_t i = 0; i < lhs.rows(); ++i)
      for (std::size_t j = 0; j < lhs.cols(); ++j)
        if (!equal_to_order(lhs(i, j), rhs(i, j), order)) {
          if (report_.verdict != Verdict::fail)
            record(Verdict::fail, name,
                   Witness{"[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]",
                           lhs(i, j).truncated(order).to_string(), rhs(i, j).truncated(order).to_string()});
          return;
        }
  }

  void numeric(const std::string& name, const oracle::NumericForm& lhs, const oracle::NumericForm& rhs) {
    OracleSummary& o = report_.oracle;
    o.ran = true;
    ++o.points;
    std::map<TermKey, std::pair<double, double>> joined;
    for (const auto& [k, v] : lhs.terms) joined[k].first = v;
    for (const auto& [k, v] : rhs.terms) joined[k].second = v;
    for (const auto& [k, p] : joined) {
      const double scale = std::max({1.0, std::abs(p.first), std::abs(p.second)});
      o.max_rel_err = std::max(o.max_rel_err, std::abs(p.first - p.second) / scale);
    }
    if (auto w = oracle::numeric_difference(lhs, rhs, kOracleTolerance)) {
      if (o.agreed) o.witness = *w;
      o.agreed = false;
      if (report_.verdict != Verdict::fail) record(Verdict::fail, name, *w);
    }
  }

  static constexpr double kOracleTolerance = 1e-9;

 private:
  void record(Verdict v, const std::string& name, const Witness& w) {
    report_.verdict = v;
    report_.failed_check = name;
    report_.witness = w;
  }

  VerificationReport& report_;
  bool allow_sign_;
};

inline std::vector<std::vector<Rational>> oracle_points(const ScenarioSpec& spec) {
  CounterRng rng(spec.seed, 0x0AC1E);
  std::vector<std::vector<Rational>> pts;
  for (int p = 0; p < spec.oracle_points; ++p) {
    std::vector<Rational> pt;
    for (int a = 0; a < spec.d; ++a) {
      Rational r = rng.small_rational() / 6;
      r.canonicalize();
      pt.push_back(r);
    }
    pts.push_back(std::move(pt));
  }
  return pts;
}

inline ChartForm top_fiber_form(const Chart& chart) {
  ChartForm top = ChartForm::one(chart);
  for (int i = 0; i < chart.fiber_dim; ++i) top = wedge(top, ChartForm::dx(chart, i));
  return top;
}

/// Oracle step shared by the push-forward scenarios: quadrature of the
/// integrand over the last `count` fibers against the exact left side.
inline void oracle_pushforward(CheckLog& log, const ScenarioSpec& spec, int order, const GaussianChartForm& integrand,
                               int count, const GaussianChartForm& expected) {
  if (!spec.oracle) return;
  std::vector<int> h(static_cast<std::size_t>(count));
  std::iota(h.begin(), h.end(), integrand.chart().fiber_dim - count);
  for (const auto& pt : oracle_points(spec)) {
    const auto numeric = oracle::quad_fiber_integrate(oracle::evaluate_at(integrand, pt, order), h);
    log.numeric("oracle", oracle::evaluate_at(expected, pt, order), numeric);
  }
}

inline void require_sizes(const ScenarioSpec& spec, bool need_m) {
  if (spec.n < 1 || (need_m && spec.m < 1) || spec.m < 0 || spec.d < 1 || spec.K < 1)
    throw DimensionMismatch("scenario sizes out of range");
}

}  // namespace detail

/// The proof's route to (pi_1)_* Phi_0: split the (dx + A^T dA x)_i factors,
/// integrate the x_h-linear parts with the 1-form valued Wick formula.
inline GaussianChartForm pushforward_via_wick(const OrthoJetMatrix& a, int n, const Chart& chart_o) {
  const int total = static_cast<int>(a.rows());
  const int m = total - n;
  const FormMatrix mc = maurer_cartan(a, chart_o);
  const FormMatrix theta = block(mc, Block::oo, n);
  const FormMatrix oh = block(mc, Block::oh, n);
  const auto factors = covariant_fiber_differentials(chart_o, theta);

  ChartForm sum(chart_o);
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    std::vector<int> first, rest;
    for (int i = 0; i < n; ++i) (bits & (1u << i) ? rest : first).push_back(i);
    ChartForm term = ChartForm::one(chart_o);
    for (int i : first) term = wedge(term, factors[i]);
    if (term.is_zero()) continue;
    WickInput in{m, chart_o, {}};
    for (int i : rest) {
      std::vector<ChartForm> row;
      for (int k = 0; k < m; ++k) row.push_back(oh(i, k));
      in.rows.push_back(std::move(row));
    }
    term = wedge(term, wick(in));
    if (split_sign(first, rest) < 0)
      sum -= term;
    else
      sum += term;
  }
  return GaussianChartForm(Scalar::pi_power(-total) * sum);
}

/// Connection form of theta restricted to the span of the first k columns of
/// the orthogonal frame A, in that frame: [A^T theta_Q A + A^T dA]_oo with
/// Q = A Q0 A^T.
inline FormMatrix restrict_to_frame(const FormMatrix& theta, const OrthoJetMatrix& a, std::size_t k) {
  const JetMatrix& am = a.matrix();
  const std::size_t total = am.rows();
  const JetMatrix q = am * reflection_q0(k, total - k, am.base_dim(), am.order()) * am.transpose();
  const FormMatrix constrained = constrain(theta, q);
  const FormMatrix gauge = a.inverse() * constrained * am + maurer_cartan(a, theta.chart());
  return block(gauge, Block::oo, k);
}

/// Block matrix of the partition-of-unity lemma for s = 2:
///   [ 0        -xi1 I           -xi2 I          ]
///   [ xi1 A1   (1 - xi1^2) A1   -xi1 xi2 A1     ]
///   [ xi2 A2   -xi2 xi1 A2      (1 - xi2^2) A2  ]
inline JetMatrix partition_frame(const std::vector<Jet>& xi, const std::vector<JetMatrix>& frames) {
  const std::size_t s = xi.size();
  const std::size_t size = frames.front().rows();
  const int d = frames.front().base_dim(), k = frames.front().order();
  const Jet one = Jet::constant(d, k, Scalar(1));
  const JetMatrix id = JetMatrix::identity(size, d, k);
  JetMatrix out((s + 1) * size, (s + 1) * size, d, k);
  for (std::size_t i = 0; i < s; ++i) {
    out.set_block(0, (i + 1) * size, -(xi[i] * id));
    out.set_block((i + 1) * size, 0, xi[i] * frames[i]);
    for (std::size_t j = 0; j < s; ++j) {
      const Jet coeff = (i == j ? one : Jet(d, k)) - xi[i] * xi[j];
      out.set_block((i + 1) * size, (j + 1) * size, coeff * frames[i]);
    }
  }
  return out;
}

/// [[xi1 I, -xi2 I], [xi2 I, xi1 I]]; the first n columns are the inclusion
/// iota = (xi1 I; xi2 I).
inline JetMatrix patch_rotation(const std::vector<Jet>& xi, std::size_t n) {
  const int d = xi[0].base_dim(), k = xi[0].order();
  const JetMatrix id = JetMatrix::identity(n, d, k);
  JetMatrix r(2 * n, 2 * n, d, k);
  r.set_block(0, 0, xi[0] * id);
  r.set_block(0, n, -(xi[1] * id));
  r.set_block(n, 0, xi[1] * id);
  r.set_block(n, n, xi[0] * id);
  return r;
}

inline JetMatrix patch_inclusion(const std::vector<Jet>& xi, std::size_t n) {
  const int d = xi[0].base_dim(), k = xi[0].order();
  const JetMatrix id = JetMatrix::identity(n, d, k);
  JetMatrix iota(2 * n, n, d, k);
  iota.set_block(0, 0, xi[0] * id);
  iota.set_block(n, 0, xi[1] * id);
  return iota;
}

/// Random Wick rows. Scalar rows hold jets; 1-form rows are combinations of
/// dt's and of the chart's auxiliary dx's (never integrated).
inline WickInput random_wick_input(int l, int s, int degree, const Chart& chart, CounterRng& rng) {
  WickInput in{l, chart, {}};
  for (int j = 0; j < s; ++j) {
    std::vector<ChartForm> row;
    for (int k = 0; k < l; ++k) {
      ChartForm e(chart);
      if (degree == 0) {
        e = ChartForm::function(chart, random_jet(rng, chart.base_dim, chart.order));
      } else {
        for (int a = 0; a < chart.base_dim; ++a)
          if (rng.uniform(0, 1)) e += random_jet(rng, chart.base_dim, chart.order) * ChartForm::dt(chart, a);
        for (int i = 0; i < chart.fiber_dim; ++i)
          if (rng.uniform(0, 1)) e += Scalar(rng.small_rational()) * ChartForm::dx(chart, i);
      }
      row.push_back(std::move(e));
    }
    in.rows.push_back(std::move(row));
  }
  return in;
}

/// exp(-|z|^2) (b_1^T z) ... (b_s^T z) dz_1 ... dz_l on the chart extended by
/// the l integration coordinates (appended after the entries' fibers).
inline GaussianChartForm wick_integrand(const WickInput& in) {
  const Chart& c = in.chart;
  const Chart ext(c.base_dim, c.fiber_dim + in.l, 0, c.order);
  ChartForm prod = ChartForm::one(ext);
  for (const auto& row : in.rows) {
    ChartForm lin(ext);
    for (int k = 0; k < in.l; ++k)
      if (!row[k].is_zero()) lin += wedge(row[k].on_chart(ext), ChartForm::x(ext, c.fiber_dim + k));
    prod = wedge(prod, lin);
  }
  for (int k = 0; k < in.l; ++k) prod = wedge(prod, ChartForm::dx(ext, c.fiber_dim + k));
  return GaussianChartForm(prod);
}

// ---------------------------------------------------------------------------
// Scenario runners
// ---------------------------------------------------------------------------

inline void run_theorem_nat_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, true);
  detail::CheckLog log(report);
  const int n = spec.n, total = spec.n + spec.m;
  const OrthoJetMatrix a = cayley(random_skew_jet(static_cast<std::size_t>(total), spec.d, spec.K, spec.seed));

  const Chart chart_y(spec.d, total, n, spec.K);
  const Chart chart_o(spec.d, n, n, spec.K);
  const GaussianChartForm phi0(Scalar::pi_power(-total) * detail::top_fiber_form(chart_y));
  // y = A x
  const GaussianChartForm pulled = substitute_fiber_frame(phi0, a.matrix(), chart_y);
  const GaussianChartForm direct = fiber_integrate_last(pulled, spec.m);

  const Connection conn = restricted_connection(a, static_cast<std::size_t>(n), base_chart(spec.d, spec.K));
  const GaussianChartForm lhs = mq_form(chart_o, conn.theta, conn.omega);
  const GaussianChartForm via_wick = pushforward_via_wick(a, n, chart_o);

  log.exact("mq-vs-pushforward", lhs, direct, order);
  log.exact("mq-vs-wick-route", lhs, via_wick, order);
  report.term_counts = {{"lhs", lhs.term_count()}, {"integrand", pulled.term_count()}, {"rhs", direct.term_count()}};
  detail::oracle_pushforward(log, spec, order, pulled, spec.m, lhs);
}

inline void run_theorem_res_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, true);
  detail::CheckLog log(report);
  const int n = spec.n, total = spec.n + spec.m;
  const Chart base = base_chart(spec.d, spec.K);
  const FormMatrix theta = random_skew_one_forms(static_cast<std::size_t>(total), base, spec.seed);
  const FormMatrix omega = curvature_structure(theta);
  const FormMatrix theta_v = block(theta, Block::oo, static_cast<std::size_t>(n));

  const GaussianChartForm lhs = mq_form(Chart(spec.d, n, n, spec.K), theta_v, curvature_structure(theta_v));
  const GaussianChartForm ambient = mq_form(Chart(spec.d, total, n, spec.K), theta, omega);
  const GaussianChartForm rhs = fiber_integrate_last(ambient, spec.m);

  log.exact("restriction", lhs, rhs, order);
  report.term_counts = {{"lhs", lhs.term_count()}, {"ambient", ambient.term_count()}, {"rhs", rhs.term_count()}};
  detail::oracle_pushforward(log, spec, order, ambient, spec.m, lhs);
}

/// Connection used by closedness/normalization: induced by a random Cayley
/// frame when m >= 1, otherwise an arbitrary random skew matrix of 1-forms.
inline FormMatrix scenario_connection(const ScenarioSpec& spec) {
  const Chart base = base_chart(spec.d, spec.K);
  if (spec.m >= 1) {
    const OrthoJetMatrix a =
        cayley(random_skew_jet(static_cast<std::size_t>(spec.n + spec.m), spec.d, spec.K, spec.seed));
    return restricted_connection(a, static_cast<std::size_t>(spec.n), base).theta;
  }
  return random_skew_one_forms(static_cast<std::size_t>(spec.n), base, spec.seed);
}

inline void run_closedness_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, false);
  detail::CheckLog log(report);
  const FormMatrix theta = scenario_connection(spec);
  const Chart chart(spec.d, spec.n, spec.n, spec.K);
  const GaussianChartForm tmq = mq_form(chart, theta, curvature_structure(theta));
  const GaussianChartForm dtmq = exterior_d(tmq);
  log.exact("d(mq)=0", dtmq, GaussianChartForm(ChartForm(chart)), order);
  report.term_counts = {{"mq", tmq.term_count()}, {"d_mq", dtmq.truncated(order).term_count()}};
  if (spec.oracle) {
    for (const auto& pt : detail::oracle_points(spec))
      log.numeric("oracle", oracle::evaluate_at(dtmq, pt, order),
                  oracle::NumericForm{chart, true, {}});
  }
}

inline void run_normalization_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, false);
  detail::CheckLog log(report);
  const FormMatrix theta = scenario_connection(spec);
  const Chart chart(spec.d, spec.n, spec.n, spec.K);
  const GaussianChartForm tmq = mq_form(chart, theta, curvature_structure(theta));
  const GaussianChartForm integral = fiber_integrate_last(tmq, spec.n);
  const Chart point(spec.d, 0, 0, spec.K);
  log.exact("pi_*(mq)=1", integral, GaussianChartForm(ChartForm::one(point)), order);
  report.term_counts = {{"mq", tmq.term_count()}, {"integral", integral.term_count()}};
  if (spec.oracle) {
    std::vector<int> all(static_cast<std::size_t>(spec.n));
    std::iota(all.begin(), all.end(), 0);
    for (const auto& pt : detail::oracle_points(spec)) {
      oracle::NumericForm one{point, false, {{TermKey{}, 1.0}}};
      log.numeric("oracle", one, oracle::quad_fiber_integrate(oracle::evaluate_at(tmq, pt, order), all));
    }
  }
}

inline void run_lemma_nat_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, true);
  detail::CheckLog log(report);
  const auto n = static_cast<std::size_t>(spec.n), total = static_cast<std::size_t>(spec.n + spec.m);
  const int d = spec.d, k = spec.K;
  const Chart base = base_chart(d, k);
  const FormMatrix theta = random_skew_one_forms(total, base, spec.seed);

  // (a), axis-aligned: V2 = span(e_1..e_n) inside V1 = span(e_1..e_k1).
  const std::size_t k1 = n + (spec.m + 1) / 2;
  const FormMatrix via_v1 =
      block(constrain(block(constrain(theta, reflection_q0(k1, total - k1, d, k)), Block::oo, k1),
                      reflection_q0(n, k1 - n, d, k)),
            Block::oo, n);
  const FormMatrix direct = block(constrain(theta, reflection_q0(n, total - n, d, k)), Block::oo, n);
  log.exact("nested-axis", via_v1, direct, k);
  log.exact("axis-restriction-is-block", direct, block(theta, Block::oo, n), k);

  // (a), base-dependent frames: V1 spanned by the first k1 columns of A1,
  // V2 by the first n columns of A1 diag(B, 1).
  const OrthoJetMatrix a1 = cayley(random_skew_jet(total, d, k, spec.seed, 1));
  const OrthoJetMatrix b = cayley(random_skew_jet(k1, d, k, spec.seed, 2));
  const JetMatrix b_ext = JetMatrix::block_diagonal(b.matrix(), JetMatrix::identity(total - k1, d, k));
  const FormMatrix nested = restrict_to_frame(restrict_to_frame(theta, a1, k1), b, n);
  const FormMatrix composed = restrict_to_frame(theta, OrthoJetMatrix(a1.matrix() * b_ext), n);
  log.exact("nested-frames", nested, composed, order);

  // constrain is idempotent
  const JetMatrix q = a1.matrix() * reflection_q0(n, total - n, d, k) * a1.matrix().transpose();
  const FormMatrix once = constrain(theta, q);
  log.exact("idempotent", constrain(once, q), once, order);

  // (b) direct sums
  const FormMatrix theta2 = random_skew_one_forms(total, base, spec.seed, 3);
  const OrthoJetMatrix a2 = cayley(random_skew_jet(total, d, k, spec.seed, 4));
  const JetMatrix q2 = a2.matrix() * reflection_q0(n, total - n, d, k) * a2.matrix().transpose();
  log.exact("direct-sum-constrain",
            constrain(FormMatrix::block_diagonal(theta, theta2), JetMatrix::block_diagonal(q, q2)),
            FormMatrix::block_diagonal(constrain(theta, q), constrain(theta2, q2)), k);

  // frame of V1 (+) V2 first, then the complements
  JetMatrix frame(2 * total, 2 * total, d, k);
  frame.set_block(0, 0, a1.matrix().submatrix(0, 0, total, n));
  frame.set_block(total, n, a2.matrix().submatrix(0, 0, total, n));
  frame.set_block(0, 2 * n, a1.matrix().submatrix(0, n, total, total - n));
  frame.set_block(total, n + total, a2.matrix().submatrix(0, n, total, total - n));
  const FormMatrix sum_restricted =
      restrict_to_frame(FormMatrix::block_diagonal(theta, theta2), OrthoJetMatrix(frame), 2 * n);
  log.exact("direct-sum-restriction", sum_restricted,
            FormMatrix::block_diagonal(restrict_to_frame(theta, a1, n), restrict_to_frame(theta2, a2, n)), order);
  report.term_counts = {{"theta", theta.term_count()}, {"restricted", nested.term_count()}};
}

inline void run_lemma_part_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, true);
  detail::CheckLog log(report);
  const auto n = static_cast<std::size_t>(spec.n), total = static_cast<std::size_t>(spec.n + spec.m);
  const auto xi = random_partition_of_unity(spec.s, spec.d, spec.K, spec.seed, 7);
  std::vector<JetMatrix> frames;
  for (int i = 0; i < spec.s; ++i)
    frames.push_back(cayley(random_skew_jet(total, spec.d, spec.K, spec.seed, 10 + i)).matrix());

  const Jet sum_sq = xi[0] * xi[0] + xi[1] * xi[1];
  if (!equal_to_order(sum_sq, Jet::constant(spec.d, spec.K, Scalar(1)), spec.K))
    log.jets("xi1^2+xi2^2=1", JetMatrix(1, 1, spec.d, spec.K), JetMatrix::identity(1, spec.d, spec.K), spec.K);

  const JetMatrix big = partition_frame(xi, frames);
  log.jets("orthogonal", big.transpose() * big, JetMatrix::identity(big.rows(), spec.d, spec.K), spec.K);

  const Chart base = base_chart(spec.d, spec.K);
  const FormMatrix mc = big.transpose() * FormMatrix::differential(big, base);
  FormMatrix expected(n, n, base);
  for (int i = 0; i < spec.s; ++i) {
    const FormMatrix mci = frames[i].transpose() * FormMatrix::differential(frames[i], base);
    expected = expected + (xi[i] * xi[i]) * block(mci, Block::oo, n);
  }
  log.exact("oo-block", block(mc, Block::oo, n), expected, order);
  report.term_counts = {{"frame_entries", big.rows() * big.cols()}, {"oo_terms", expected.term_count()}};
}

inline void run_theorem_patch_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  detail::require_sizes(spec, false);
  if (spec.s != 2) throw Unsupported("patching is implemented for s = 2");
  detail::CheckLog log(report, true);
  const auto n = static_cast<std::size_t>(spec.n);
  const Chart base = base_chart(spec.d, spec.K);
  const auto xi = random_partition_of_unity(2, spec.d, spec.K, spec.seed, 7);
  const FormMatrix theta1 = random_skew_one_forms(n, base, spec.seed, 1);
  const FormMatrix theta2 = random_skew_one_forms(n, base, spec.seed, 2);

  const FormMatrix theta = (xi[0] * xi[0]) * theta1 + (xi[1] * xi[1]) * theta2;
  const GaussianChartForm lhs = mq_form(Chart(spec.d, spec.n, spec.n, spec.K), theta, curvature_structure(theta));

  const Chart big(spec.d, 2 * spec.n, spec.n, spec.K);
  const GaussianChartForm big_mq =
      mq_form(big, FormMatrix::block_diagonal(theta1, theta2),
              FormMatrix::block_diagonal(curvature_structure(theta1), curvature_structure(theta2)));
  const OrthoJetMatrix rotation(patch_rotation(xi, n));
  // The kept frame columns are iota, so the push-forward is already written
  // in iota-pulled-back coordinates.
  log.jets("frame-starts-with-iota", rotation.matrix().submatrix(0, 0, 2 * n, n), patch_inclusion(xi, n), spec.K);
  const GaussianChartForm rhs = fiber_integrate_rotated(big_mq, rotation, spec.n);
  log.exact("patching", lhs, rhs, order);
  report.term_counts = {{"lhs", lhs.term_count()}, {"big_mq", big_mq.term_count()}, {"rhs", rhs.term_count()}};

  if (spec.oracle) {
    const GaussianChartForm rotated =
        substitute_fiber_frame(big_mq, rotation.matrix(), Chart(spec.d, 2 * spec.n, spec.n, spec.K));
    detail::oracle_pushforward(log, spec, order, rotated, spec.n, lhs);
  }
}

/// Wick formula against factorized moments for scalar and 1-form rows with
/// l = n and s = spec.s rows.
inline void run_wick_crosscheck_checks(const ScenarioSpec& spec, int order, VerificationReport& report) {
  if (spec.n < 1 || spec.s < 0 || spec.d < 0) throw DimensionMismatch("scenario sizes out of range");
  detail::CheckLog log(report);
  CounterRng rng(spec.seed, 0x771C);
  std::size_t terms = 0;
  for (int degree = 0; degree <= 1; ++degree) {
    const Chart chart(spec.d, degree == 0 ? 0 : spec.s, 0, spec.K);
    const WickInput in = random_wick_input(spec.n, spec.s, degree, chart, rng);
    const ChartForm via_wick = wick(in);
    const ChartForm direct = wick_direct(in);
    const std::string tag = degree == 0 ? "scalar" : "one-form";
    log.exact("wick-vs-moments-" + tag, via_wick, direct, order);
    terms += via_wick.term_count();
    if (spec.oracle) {
      const GaussianChartForm integrand = wick_integrand(in);
      std::vector<int> z(static_cast<std::size_t>(in.l));
      std::iota(z.begin(), z.end(), chart.fiber_dim);
      for (const auto& pt : detail::oracle_points(spec))
        log.numeric("oracle-" + tag, oracle::evaluate_at(via_wick, pt, order),
                    oracle::quad_fiber_integrate(oracle::evaluate_at(integrand, pt, order), z));
    }
  }
  report.term_counts = {{"wick", terms}};
}

inline VerificationReport run_scenario(const ScenarioSpec& spec) {
  VerificationReport report;
  report.spec = spec;
  report.compare_order = spec.compare_order.value_or(default_compare_order(spec));
  const auto start = std::chrono::steady_clock::now();
  try {
    if (report.compare_order > spec.K || report.compare_order < 0)
      throw DimensionMismatch("compare order must lie in [0, K]");
    const int order = report.compare_order;
    switch (spec.id) {
      case ScenarioId::theorem_nat: run_theorem_nat_checks(spec, order, report); break;
      case ScenarioId::theorem_res: run_theorem_res_checks(spec, order, report); break;
      case ScenarioId::closedness: run_closedness_checks(spec, order, report); break;
      case ScenarioId::normalization: run_normalization_checks(spec, order, report); break;
      case ScenarioId::lemma_nat: run_lemma_nat_checks(spec, order, report); break;
      case ScenarioId::lemma_part: run_lemma_part_checks(spec, order, report); break;
      case ScenarioId::theorem_patch: run_theorem_patch_checks(spec, order, report); break;
      case ScenarioId::wick_crosscheck: run_wick_crosscheck_checks(spec, order, report); break;
    }
  } catch (const std::exception& e) {
    report.verdict = Verdict::fail;
    report.failed_check = "exception";
    report.error = e.what();
    report.witness = Witness{"<exception>", e.what(), ""};
  }
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline auto report_order_key(const VerificationReport& r) {
  const auto& s = r.spec;
  return std::make_tuple(static_cast<int>(s.id), s.n, s.m, s.d, s.K, s.s, s.seed);
}

/// Runs every scenario on up to `workers` threads; output is sorted by scenario
/// id, sizes and seed independently of scheduling.
inline std::vector<VerificationReport> run_all(const std::vector<ScenarioSpec>& specs, int workers = 1) {
  std::vector<VerificationReport> reports(specs.size());
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) reports[i] = run_scenario(specs[i]);
  } else {
    std::mutex mutex;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard lock(mutex);
            if (next >= specs.size()) return;
            i = next++;
          }
          reports[i] = run_scenario(specs[i]);
        }
      });
    for (auto& th : pool) th.join();
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return report_order_key(a) < report_order_key(b); });
  return reports;
}

/// Full verification grid, capped at ambient rank `max_rank`, seeds 1..seeds
/// (theorem-nat additionally runs the flat sentinel seed 0).
inline std::vector<ScenarioSpec> suite_specs(int max_rank, int seeds, bool oracle = true) {
  std::vector<ScenarioSpec> out;
  auto add = [&](ScenarioId id, int n, int m, int d, int k, int s, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.id = id;
    spec.n = n;
    spec.m = m;
    spec.d = d;
    spec.K = k;
    spec.s = s;
    spec.seed = seed;
    spec.oracle = oracle;
    out.push_back(spec);
  };
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      if (n + m > max_rank) continue;
      for (int d = 1; d <= 2; ++d)
        for (int k = 2; k <= 3; ++k)
          for (int seed = 1; seed <= seeds; ++seed) add(ScenarioId::theorem_nat, n, m, d, k, 2, seed);
      add(ScenarioId::theorem_nat, n, m, 1, 2, 2, 0);
      for (int d = 1; d <= 2; ++d)
        for (int seed = 1; seed <= seeds; ++seed) add(ScenarioId::theorem_res, n, m, d, 3, 2, seed);
    }
  for (int n = 1; n <= std::min(3, max_rank); ++n)
    for (int d = 1; d <= 2; ++d)
      for (int seed = 1; seed <= seeds; ++seed) {
        add(ScenarioId::closedness, n, 0, d, 3, 2, seed);
        if (n + 1 <= max_rank) add(ScenarioId::closedness, n, 1, d, 3, 2, seed);
      }
  for (int n = 1; n <= std::min(4, max_rank); ++n)
    for (int seed = 1; seed <= seeds; ++seed) add(ScenarioId::normalization, n, 0, 2, 3, 2, seed);
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      if (n + m > max_rank) continue;
      for (int seed = 1; seed <= seeds; ++seed) {
        add(ScenarioId::lemma_nat, n, m, 1, 2, 2, seed);
        add(ScenarioId::lemma_part, n, m, 1, 2, 2, seed);
      }
    }
  for (int n = 1; n <= 2; ++n) {
    if (2 * n > max_rank) continue;
    for (int seed = 1; seed <= std::min(seeds, 5); ++seed) add(ScenarioId::theorem_patch, n, 0, 1, 2, 2, seed);
  }
  for (int l = 1; l <= std::min(4, max_rank); ++l)
    for (int s = 0; s <= 4; ++s)
      for (int seed = 1; seed <= std::max(1, seeds / 5); ++seed) add(ScenarioId::wick_crosscheck, l, 0, 2, 2, s, seed);
  return out;
}

}  // namespace mqthom::harness
