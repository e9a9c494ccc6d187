#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mqthom/harness/report.hpp"
#include "mqthom/harness/scenarios.hpp"

namespace mqthom::harness {

struct CliOptions {
  std::string scenario;
  bool all = false;
  int n = 2;
  int m = 1;
  int base_dim = 1;
  int order = 3;
  int summands = 2;
  std::optional<int> compare_order;
  std::uint64_t seed = 1;
  int seeds = 0;  // 0: only --seed
  int max_rank = 4;
  std::string report;
  int workers = 1;
  bool oracle = true;
  bool timing = true;
  bool quiet = false;
};

/// Specs selected by parsed options; throws CLI::ValidationError on
/// inconsistent selections.
inline std::vector<ScenarioSpec> specs_from(const CliOptions& o) {
  if (o.all == !o.scenario.empty()) throw CLI::ValidationError("run", "exactly one of --scenario or --all is required");
  if (o.all) return suite_specs(o.max_rank, o.seeds > 0 ? o.seeds : 10, o.oracle);
  const auto id = parse_scenario(o.scenario);
  if (!id) throw CLI::ValidationError("--scenario", "unknown scenario '" + o.scenario + "'");
  std::vector<ScenarioSpec> out;
  std::vector<std::uint64_t> seeds;
  if (o.seeds > 0)
    for (int s = 1; s <= o.seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  else
    seeds.push_back(o.seed);
  for (auto seed : seeds) {
    ScenarioSpec spec;
    spec.id = *id;
    spec.n = o.n;
    spec.m = o.m;
    spec.d = o.base_dim;
    spec.K = o.order;
    spec.s = o.summands;
    spec.seed = seed;
    spec.compare_order = o.compare_order;
    spec.oracle = o.oracle;
    out.push_back(spec);
  }
  return out;
}

/// Reads a `key = value` file (blank lines and `#` comments ignored) and
/// turns it into the equivalent flags. Boolean keys take true/false.
inline std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> args;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    const auto e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "all" || key == "oracle" || key == "timing" || key == "quiet") {
      const bool on = value == "true" || value == "1" || value == "yes";
      if (!on && value != "false" && value != "0" && value != "no")
        throw CLI::ValidationError("--config", key + " expects true or false");
      if (key == "oracle" || key == "timing")
        args.push_back(on ? "--" + key : "--no-" + key);
      else if (on)
        args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

/// Entry point of the command line tool. Returns 0 iff every verdict is
/// pass, 1 on a failing verdict or I/O error, 2 on invalid usage.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact verification harness for Mathai-Quillen Thom forms", "mqthom"};
  app.require_subcommand(1);
  CliOptions o;
  CLI::App* run = app.add_subcommand("run", "run verification scenarios");
  run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  run->add_option("--config", config_path, "key = value file mirroring the flags (flags win)");
  std::string ids;
  for (const auto& [id, name] : scenario_names()) ids += (ids.empty() ? "" : ", ") + name;
  run->add_option("--scenario", o.scenario, "one of: " + ids);
  run->add_flag("--all", o.all, "run the full verification grid");
  run->add_option("--n", o.n, "rank of the bundle")->check(CLI::Range(1, 8));
  run->add_option("--m", o.m, "rank of the complement")->check(CLI::Range(0, 7));
  run->add_option("--base-dim", o.base_dim, "base dimension d")->check(CLI::Range(1, 6));
  run->add_option("--order", o.order, "jet truncation order K")->check(CLI::Range(1, 8));
  run->add_option("--s", o.summands, "summand count (patching) or Wick rows")->check(CLI::Range(0, 8));
  run->add_option("--compare-order", o.compare_order, "order for equality checks (default per scenario)");
  run->add_option("--seed", o.seed, "seed of a single instance (0: flat)");
  run->add_option("--seeds", o.seeds, "run seeds 1..N")->check(CLI::Range(1, 1000));
  run->add_option("--max-rank", o.max_rank, "largest ambient rank in --all")->check(CLI::Range(1, 8));
  run->add_option("--report", o.report, "write the JSON report to this path");
  run->add_option("--workers", o.workers, "parallel worker threads")->check(CLI::Range(1, 256));
  run->add_flag("--oracle,!--no-oracle", o.oracle, "numerical oracle confirmation (default on)");
  run->add_flag("--timing,!--no-timing", o.timing, "--no-timing writes elapsed_ms as 0 for byte-stable reports");
  run->add_flag("--quiet", o.quiet, "no per-scenario lines");

  std::vector<ScenarioSpec> specs;
  try {
    // Config entries go first so that later command line flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] != "--config" || args.empty() || args[0] != "run") continue;
      const auto extra = config_file_args(args[i + 1]);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
    specs = specs_from(o);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 2;
  }

  const auto reports = run_all(specs, o.workers);
  bool all_pass = true;
  for (const auto& r : reports) {
    all_pass = all_pass && r.verdict == Verdict::pass;
    if (!o.quiet || r.verdict != Verdict::pass) out << summary_line(r) << "\n";
  }
  out << (all_pass ? "all " : "not all ") << reports.size() << " scenario runs passed\n";
  if (!o.report.empty()) {
    std::ofstream file(o.report);
    if (!file) {
      err << "error: cannot write " << o.report << "\n";
      return 1;
    }
    file << to_json(reports, ReportOptions{o.timing}).dump(2) << "\n";
  }
  return all_pass ? 0 : 1;
}

}  // namespace mqthom::harness
