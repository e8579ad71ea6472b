#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hmix/core/params.hpp"

namespace hmix::cli {

enum ExitCode : int { kPass = 0, kRuntimeError = 1, kConfigError = 2, kFailed = 3, kInconclusive = 4 };

inline constexpr const char* kVersion = "0.1.0";

/// Options shared by every subcommand. Sentinel values (burn_in < 0,
/// epsilon == 0, k == 0, tol == 0, threads == 0) select the documented
/// defaults and are replaced by `resolve`.
struct RunConfig {
  std::string command;
  Model model = Model::Discrete;
  int n = 5;
  double beta_a = 0.5, beta_b = 0.75;
  double t_a = 1.0, t_b = 2.0;
  double epsilon = 0.0;
  double t_max = 1e5;
  double burn_in = -1.0;
  int replicas = 1;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string output = "hmix-out";
  std::size_t batches = 1000;
  std::size_t bins = 400;

  std::uint64_t samples = 1'000'000;
  bool write_samples = true;

  std::string suite = "all";
  int k = 0;
  double tol = 0.0;
  std::uint64_t mc_samples = 10'000'000;
  bool impostor = false;
  std::vector<double> lambda_grid;
  std::vector<double> t_grid;

  std::string input;
  double level = 0.01;

  ChainParams params() const;
};

/// Fills defaults and validates; throws ParameterError naming the field.
void resolve(RunConfig& config);

/// The reproducible part of the configuration (no paths, no thread count).
void to_json(nlohmann::json& j, const RunConfig& c);

int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_sample_exact(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_compare(const RunConfig& config, std::ostream& log);

/// Parses `args` (without the program name) and dispatches. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hmix::cli
