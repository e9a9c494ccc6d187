#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mqthom/harness/scenarios.hpp"

namespace mqthom::harness {

using Json = nlohmann::ordered_json;

struct ReportOptions {
  bool timing = true;  // false zeroes elapsed_ms for byte-stable output
};

inline Json to_json(const VerificationReport& r, const ReportOptions& opt = {}) {
  Json params;
  params["n"] = r.spec.n;
  params["m"] = r.spec.m;
  params["base_dim"] = r.spec.d;
  params["order"] = r.spec.K;
  params["compare_order"] = r.compare_order;
  params["s"] = r.spec.s;
  params["seed"] = r.spec.seed;
  params["oracle"] = r.spec.oracle;

  Json witness = nullptr;
  if (r.witness) {
    witness = Json::object();
    witness["check"] = r.failed_check;
    witness["term"] = r.witness->term;
    witness["lhs"] = r.witness->lhs;
    witness["rhs"] = r.witness->rhs;
  }

  Json counts = Json::object();
  for (const auto& [k, v] : r.term_counts) counts[k] = v;

  Json out;
  out["scenario"] = to_string(r.spec.id);
  out["params"] = std::move(params);
  out["verdict"] = to_string(r.verdict);
  out["witness"] = std::move(witness);
  out["elapsed_ms"] = opt.timing ? r.elapsed_ms : 0.0;
  out["term_counts"] = std::move(counts);
  Json oracle;
  oracle["ran"] = r.oracle.ran;
  oracle["agreed"] = r.oracle.agreed;
  oracle["points"] = r.oracle.points;
  oracle["max_rel_err"] = r.oracle.max_rel_err;
  out["oracle"] = std::move(oracle);
  return out;
}

inline Json to_json(const std::vector<VerificationReport>& reports, const ReportOptions& opt = {}) {
  Json list = Json::array();
  std::size_t passed = 0;
  for (const auto& r : reports) {
    list.push_back(to_json(r, opt));
    if (r.verdict == Verdict::pass) ++passed;
  }
  Json summary;
  summary["total"] = reports.size();
  summary["passed"] = passed;
  summary["failed"] = reports.size() - passed;
  Json out;
  out["reports"] = std::move(list);
  out["summary"] = std::move(summary);
  return out;
}

inline std::string summary_line(const VerificationReport& r) {
  std::string line = to_string(r.spec.id) + " n=" + std::to_string(r.spec.n) + " m=" + std::to_string(r.spec.m) +
                     " d=" + std::to_string(r.spec.d) + " K=" + std::to_string(r.spec.K) +
                     " s=" + std::to_string(r.spec.s) + " seed=" + std::to_string(r.spec.seed) + ": " +
                     to_string(r.verdict);
  if (r.witness) line += " [" + r.failed_check + "] " + r.witness->term + ": " + r.witness->lhs + " vs " + r.witness->rhs;
  return line;
}

}  // namespace mqthom::harness
