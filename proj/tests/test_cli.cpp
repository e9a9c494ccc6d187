#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mqthom/harness/cli.hpp"

using mqthom::harness::cli_main;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mqthom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mqthom_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, SingleScenarioWritesReport) {
  const auto path = temp_path("single.json");
  const auto r = run_cli({"run", "--scenario", "theorem-nat", "--n", "2", "--m", "1", "--base-dim", "1", "--order", "3",
                          "--seed", "42", "--report", path.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  std::ifstream in(path);
  const auto j = mqthom::harness::Json::parse(in);
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_EQ(j["reports"][0]["verdict"], "pass");
  EXPECT_EQ(j["reports"][0]["params"]["seed"], 42);
  std::filesystem::remove(path);
}

TEST(Cli, NormalizationDefaults) { EXPECT_EQ(run_cli({"run", "--scenario", "normalization", "--n", "3"}).code, 0); }

TEST(Cli, SeedsRange) {
  const auto r = run_cli({"run", "--scenario", "theorem-res", "--n", "1", "--m", "1", "--seeds", "3", "--workers", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("all 3 scenario runs passed"), std::string::npos);
}

TEST(Cli, InvalidUsageExitsTwo) {
  EXPECT_EQ(run_cli({"run", "--scenario", "theorem-nat", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({"run"}).code, 2);
  EXPECT_EQ(run_cli({"run", "--scenario", "no-such"}).code, 2);
  EXPECT_EQ(run_cli({"run", "--scenario", "theorem-nat", "--all"}).code, 2);
  EXPECT_EQ(run_cli({"run", "--scenario", "theorem-nat", "--n", "x"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  const auto r = run_cli({"run", "--n", "0", "--scenario", "theorem-nat"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--scenario"), std::string::npos);
}

TEST(Cli, FailingVerdictExitsOne) {
  EXPECT_EQ(run_cli({"run", "--scenario", "theorem-nat", "--n", "2", "--m", "1", "--base-dim", "2", "--order", "3", "--seed", "2",
                     "--compare-order", "3", "--no-oracle"})
                .code,
            1);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = temp_path("run.ini");
  const auto report = temp_path("cfg.json");
  {
    std::ofstream f(cfg);
    f << "# defaults for a quick check\n"
      << "scenario = theorem-res\n"
      << "n = 1\n"
      << "m = 2\n"
      << "base-dim = 2\n"
      << "seed = 5\n"
      << "oracle = false\n"
      << "report = " << report.string() << "\n";
  }
  const auto r = run_cli({"run", "--config", cfg.string(), "--seed", "6"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(report);
  const auto j = mqthom::harness::Json::parse(in);
  const auto& p = j["reports"][0]["params"];
  EXPECT_EQ(j["reports"][0]["scenario"], "theorem-res");
  EXPECT_EQ(p["m"], 2);
  EXPECT_EQ(p["base_dim"], 2);
  EXPECT_EQ(p["seed"], 6);
  EXPECT_EQ(p["oracle"], false);
  std::filesystem::remove(cfg);
  std::filesystem::remove(report);
}

TEST(Cli, NoTimingZeroesElapsed) {
  const auto path = temp_path("timing.json");
  run_cli({"run", "--scenario", "closedness", "--n", "1", "--no-timing", "--report", path.string()});
  std::ifstream in(path);
  const auto j = mqthom::harness::Json::parse(in);
  EXPECT_EQ(j["reports"][0]["elapsed_ms"], 0.0);
  std::filesystem::remove(path);
}
