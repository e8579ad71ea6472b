#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmix_cli.hpp"

using namespace hmix;
namespace fs = std::filesystem;

namespace {

struct Call {
  int code;
  std::string out, err;
};

Call hmix_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hmix-test-cli-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("config errors exit 2 and name the field") {
  const auto dir = fresh("errors").string();
  struct Case {
    std::vector<std::string> args;
    std::string field;
  };
  const std::vector<Case> cases = {
      {{"simulate", "--n", "0"}, "n"},
      {{"simulate", "--beta-a", "1.2"}, "beta-a"},
      {{"simulate", "--beta-a", "0.8", "--beta-b", "0.5"}, "beta-b"},
      {{"simulate", "--replicas", "0"}, "replicas"},
      {{"simulate", "--t-max", "10", "--burn-in", "20"}, "burn-in"},
      {{"simulate", "--model", "continuous", "--epsilon", "-1"}, "epsilon"},
      {{"simulate", "--model", "continuous", "--t-a", "3", "--t-b", "2"}, "t-b"},
      {{"verify", "--suite", "stationarity", "--n", "3"}, "n"},
      {{"verify", "--suite", "bogus"}, "suite"},
      {{"compare", "--level", "2"}, "level"},
  };
  for (auto c : cases) {
    c.args.insert(c.args.end(), {"--output", dir});
    const auto r = hmix_run(c.args);
    CAPTURE(c.args[1]);
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("invalid " + c.field + ":") != std::string::npos);
  }
  CHECK(hmix_run({"simulate", "--no-such-flag"}).code == cli::kConfigError);
  CHECK(hmix_run({}).code == cli::kConfigError);
  CHECK(hmix_run({"simulate", "--model", "lattice"}).code == cli::kConfigError);
}

TEST_CASE("unwritable output directory is a config error") {
  const auto file = fresh("blocker");
  std::ofstream(file) << "x";
  const auto r = hmix_run({"simulate", "--output", (file / "sub").string()});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("invalid output:") != std::string::npos);
  fs::remove(file);
}

TEST_CASE("help and version exit 0") {
  CHECK(hmix_run({"--help"}).code == cli::kPass);
  const auto v = hmix_run({"--version"});
  CHECK(v.code == cli::kPass);
  CHECK(v.out == std::string(cli::kVersion) + "\n");
}

TEST_CASE("simulate records replicas, streams and seed") {
  const auto dir = fresh("replicas");
  const auto r = hmix_run({"simulate", "--model", "discrete", "--n", "5", "--beta-a", "0.5", "--beta-b", "0.75",
                           "--t-max", "2000", "--seed", "42", "--replicas", "8", "--output", dir.string()});
  REQUIRE(r.code == cli::kPass);
  for (const char* f : {"histograms.csv", "profile.csv", "covariance.csv", "stats.json", "meta.json"})
    CHECK(fs::exists(dir / f));
  const auto meta = load(dir / "meta.json");
  CHECK(meta.at("streams") == nlohmann::json({0, 1, 2, 3, 4, 5, 6, 7}));
  CHECK(meta.at("seed") == 42);
  CHECK(meta.at("config").at("replicas") == 8);
  CHECK(meta.at("config").at("burn_in") == doctest::Approx(200.0));
  CHECK(meta.at("version") == cli::kVersion);
  CHECK_FALSE(meta.contains("epsilon"));
  CHECK(load(dir / "stats.json").at("stats").at("replicas") == 8);

  const auto hist = slurp(dir / "histograms.csv");
  CHECK(hist.starts_with("# config: {"));
  CHECK(hist.find("\nsite,value,weight\n") != std::string::npos);
}

TEST_CASE("continuous simulate records epsilon") {
  const auto dir = fresh("epsilon");
  REQUIRE(hmix_run({"simulate", "--model", "continuous", "--n", "2", "--t-max", "200", "--output", dir.string()}).code ==
          cli::kPass);
  CHECK(load(dir / "meta.json").at("epsilon") == doctest::Approx(1e-6));
  REQUIRE(hmix_run({"simulate", "--model", "continuous", "--n", "2", "--t-a", "0.5", "--t-max", "200", "--epsilon",
                    "1e-4", "--output", dir.string()})
              .code == cli::kPass);
  CHECK(load(dir / "meta.json").at("epsilon") == doctest::Approx(1e-4));
  CHECK(slurp(dir / "histograms.csv").find("\nsite,bin,lower,upper,weight\n") != std::string::npos);
}

TEST_CASE("config file supplies values and flags win") {
  const auto dir = fresh("config");
  fs::create_directories(dir);
  const auto cfg = dir / "run.ini";
  std::ofstream(cfg) << "n=3\nt-max=500\nseed=7\nreplicas=2\n";
  REQUIRE(hmix_run({"--config", cfg.string(), "simulate", "--seed", "11", "--output", (dir / "out").string()}).code ==
          cli::kPass);
  const auto c = load(dir / "out" / "meta.json").at("config");
  CHECK(c.at("n") == 3);
  CHECK(c.at("t_max") == doctest::Approx(500.0));
  CHECK(c.at("replicas") == 2);
  CHECK(c.at("seed") == 11);
}

TEST_CASE("output directory defaults to the environment variable") {
  const auto dir = fresh("env");
  ::setenv("HMIX_OUTPUT_DIR", dir.string().c_str(), 1);
  const auto r = hmix_run({"verify", "--suite", "identities"});
  ::unsetenv("HMIX_OUTPUT_DIR");
  CHECK(r.code == cli::kPass);
  CHECK(fs::exists(dir / "reports.jsonl"));
}

TEST_CASE("verify exit codes follow the report status") {
  const auto dir = fresh("verify").string();
  CHECK(hmix_run({"verify", "--suite", "stationarity", "--n", "1", "--k", "200", "--output", dir}).code == cli::kPass);
  CHECK(hmix_run({"verify", "--suite", "stationarity", "--n", "1", "--impostor", "--output", dir}).code ==
        cli::kFailed);
  CHECK(hmix_run({"verify", "--suite", "stationarity", "--n", "2", "--k", "10", "--output", dir}).code ==
        cli::kInconclusive);
  CHECK(hmix_run({"verify", "--suite", "telescoping", "--n", "3", "--output", dir}).code == cli::kPass);
  CHECK(hmix_run({"verify", "--suite", "equilibrium", "--n", "2", "--output", dir}).code == cli::kPass);

  std::istringstream lines(slurp(fs::path(dir) / "reports.jsonl"));
  std::string line;
  std::getline(lines, line);
  CHECK(nlohmann::json::parse(line).at("config").at("suite") == "equilibrium");
  int records = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("status") == "pass");
    ++records;
  }
  CHECK(records == 2);
}

TEST_CASE("telescoping grids come from the command line") {
  const auto dir = fresh("grid");
  REQUIRE(hmix_run({"verify", "--suite", "telescoping", "--n", "2", "--lambda-grid", "0.2,0.4", "--t-grid", "-0.5",
                    "--output", dir.string()})
              .code == cli::kPass);
  std::istringstream lines(slurp(dir / "reports.jsonl"));
  std::string line;
  int records = -1;
  while (std::getline(lines, line)) ++records;
  CHECK(records == 3);
}

TEST_CASE("sample-exact writes configurations and summaries") {
  const auto dir = fresh("exact");
  REQUIRE(hmix_run({"sample-exact", "--n", "3", "--samples", "2000", "--seed", "3", "--output", dir.string()}).code ==
          cli::kPass);
  std::istringstream lines(slurp(dir / "samples.csv"));
  std::string line;
  std::getline(lines, line);
  CHECK(line.starts_with("# config: "));
  std::getline(lines, line);
  CHECK(line == "eta_1,eta_2,eta_3");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2000);
  for (const char* f : {"moments.csv", "covariance.csv", "gof.csv", "summary.json"}) CHECK(fs::exists(dir / f));
}

TEST_CASE("compare on an equilibrium run passes and writes its tables") {
  const auto dir = fresh("compare");
  REQUIRE(hmix_run({"simulate", "--n", "2", "--beta-a", "0.5", "--beta-b", "0.5", "--t-max", "2e4", "--seed", "4",
                    "--output", dir.string()})
              .code == cli::kPass);
  const auto r = hmix_run({"compare", "--output", dir.string()});
  CHECK(r.code == cli::kPass);
  const auto summary = load(dir / "compare.json");
  CHECK(summary.at("status") == "pass");
  CHECK(summary.at("config").at("simulation").at("beta_b") == doctest::Approx(0.5));
  CHECK(summary.at("gof").size() == 2);
  CHECK(hmix_run({"compare", "--input", fresh("missing").string(), "--output", dir.string()}).code ==
        cli::kRuntimeError);
}

TEST_CASE("compare fails when the simulation disagrees with the measure") {
  const auto dir = fresh("mismatch");
  REQUIRE(hmix_run({"simulate", "--n", "3", "--beta-a", "0.5", "--beta-b", "0.75", "--t-max", "2e4", "--seed", "4",
                    "--output", dir.string()})
              .code == cli::kPass);
  // relabel the run as an equilibrium one so the reference law is wrong
  auto meta = load(dir / "meta.json");
  meta["config"]["beta_b"] = 0.5;
  std::ofstream(dir / "meta.json") << meta.dump();
  CHECK(hmix_run({"compare", "--output", dir.string()}).code == cli::kFailed);
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
  const auto a = fresh("det-a"), b = fresh("det-b");
  const std::vector<std::string> base = {"simulate", "--model", "continuous", "--n", "3", "--t-max", "500",
                                         "--replicas", "3", "--seed", "5", "--output"};
  auto args = base;
  args.insert(args.end(), {a.string(), "--threads", "1"});
  REQUIRE(hmix_run(args).code == cli::kPass);
  args = base;
  args.insert(args.end(), {b.string(), "--threads", "3"});
  REQUIRE(hmix_run(args).code == cli::kPass);
  for (const char* f : {"histograms.csv", "profile.csv", "covariance.csv", "stats.json", "meta.json"})
    CHECK(slurp(a / f) == slurp(b / f));
}
