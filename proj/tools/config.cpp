#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hmix/sim/continuous.hpp"
#include "hmix_cli.hpp"

namespace hmix::cli {

namespace fs = std::filesystem;

ChainParams RunConfig::params() const {
  return model == Model::Discrete ? ChainParams::discrete(n, beta_a, beta_b) : ChainParams::continuous(n, t_a, t_b);
}

void resolve(RunConfig& c) {
  if (c.command == "verify") {
    ChainParams::discrete(c.n, c.beta_a, c.beta_b);
    ChainParams::continuous(c.n, c.t_a, c.t_b);
  }
  const ChainParams params = c.params();
  if (c.replicas < 1) throw ParameterError("replicas", "must be >= 1");
  if (!(c.t_max > 0.0 && std::isfinite(c.t_max))) throw ParameterError("t-max", "must be positive and finite");
  if (c.burn_in < 0.0) c.burn_in = 0.1 * c.t_max;
  if (!(c.burn_in < c.t_max)) throw ParameterError("burn-in", "must be smaller than t-max");
  if (c.epsilon < 0.0) throw ParameterError("epsilon", "must be positive (0 selects the default)");
  if (c.model == Model::Continuous && c.epsilon == 0.0) c.epsilon = sim::default_epsilon(params);
  if (c.model == Model::Discrete) c.epsilon = 0.0;
  if (c.batches < 2) throw ParameterError("batches", "must be >= 2");
  if (c.bins < 10) throw ParameterError("bins", "must be >= 10");
  if (c.samples < 1) throw ParameterError("samples", "must be >= 1");
  if (c.suite != "identities" && c.suite != "telescoping" && c.suite != "stationarity" &&
      c.suite != "equilibrium" && c.suite != "all")
    throw ParameterError("suite", "must be identities, telescoping, stationarity, equilibrium or all");
  if (c.k < 0) throw ParameterError("k", "must be >= 1 (0 selects the default)");
  if (c.tol < 0.0) throw ParameterError("tol", "must be positive (0 selects the default)");
  if (c.mc_samples < 2) throw ParameterError("mc-samples", "must be >= 2");
  if (!(c.level > 0.0 && c.level < 1.0)) throw ParameterError("level", "must lie in (0,1)");
  if (c.threads == 0) c.threads = std::max(1u, std::thread::hardware_concurrency());

  std::error_code ec;
  fs::create_directories(c.output, ec);
  const fs::path probe = fs::path(c.output) / ".hmix-write-test";
  if (ec || !std::ofstream(probe)) throw ParameterError("output", "directory '" + c.output + "' is not writable");
  fs::remove(probe, ec);
  if (c.input.empty()) c.input = c.output;
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"command", c.command}, {"version", kVersion}, {"model", to_string(c.model)}, {"n", c.n}, {"seed", c.seed}};
  const bool discrete = c.model == Model::Discrete || c.command == "verify";
  const bool continuous = c.model == Model::Continuous || c.command == "verify";
  if (discrete) {
    j["beta_a"] = c.beta_a;
    j["beta_b"] = c.beta_b;
  }
  if (continuous) {
    j["t_a"] = c.t_a;
    j["t_b"] = c.t_b;
  }
  if (c.command == "simulate") {
    j["t_max"] = c.t_max;
    j["burn_in"] = c.burn_in;
    j["replicas"] = c.replicas;
    j["batches"] = c.batches;
    if (c.model == Model::Continuous) {
      j["epsilon"] = c.epsilon;
      j["bins"] = c.bins;
    }
  } else if (c.command == "sample-exact") {
    j["samples"] = c.samples;
  } else if (c.command == "verify") {
    j["suite"] = c.suite;
    j["k"] = c.k;
    j["tol"] = c.tol;
    j["mc_samples"] = c.mc_samples;
    j["impostor"] = c.impostor;
    j["lambda_grid"] = c.lambda_grid;
    j["t_grid"] = c.t_grid;
  } else if (c.command == "compare") {
    j["level"] = c.level;
  }
}

namespace {

void add_common_options(CLI::App& app, RunConfig& c) {
  app.add_option_function<std::string>(
         "--model", [&c](const std::string& m) { c.model = model_from_string(m); }, "discrete or continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  app.add_option("--n", c.n, "number of sites");
  app.add_option("--beta-a", c.beta_a, "left reservoir parameter (discrete)");
  app.add_option("--beta-b", c.beta_b, "right reservoir parameter (discrete)");
  app.add_option("--t-a", c.t_a, "left temperature (continuous)");
  app.add_option("--t-b", c.t_b, "right temperature (continuous)");
  app.add_option("--epsilon", c.epsilon, "jump-size cutoff (continuous; default 1e-6 min(T_A, 1))");
  app.add_option("--t-max", c.t_max, "simulated time");
  app.add_option("--burn-in", c.burn_in, "discarded initial time (default 10% of t-max)");
  app.add_option("--replicas", c.replicas, "independent trajectories");
  app.add_option("--threads", c.threads, "worker threads (default: available parallelism)");
  app.add_option("--seed", c.seed, "root seed");
  app.add_option("--output", c.output, "output directory")->envname("HMIX_OUTPUT_DIR");
  app.add_option("--batches", c.batches, "batches for the variance estimates");
  app.add_option("--bins", c.bins, "log bins for continuous histograms");
  app.add_option("--samples", c.samples, "exact draws (sample-exact)");
  app.add_option("--write-samples", c.write_samples, "write samples.csv (sample-exact)");
  app.add_option("--suite", c.suite, "identities|telescoping|stationarity|equilibrium|all (verify)");
  app.add_option("--k", c.k, "truncation box for direct stationarity (verify)");
  app.add_option("--tol", c.tol, "residual tolerance (verify)");
  app.add_option("--mc-samples", c.mc_samples, "Monte Carlo samples for telescoping at N > 3 (verify)");
  app.add_flag("--impostor", c.impostor, "run the checks against the wrong product law (verify)");
  app.add_option("--lambda-grid", c.lambda_grid, "constant lambda values for telescoping (verify)")->delimiter(',');
  app.add_option("--t-grid", c.t_grid, "constant t values for telescoping (verify)")->delimiter(',');
  app.add_option("--input", c.input, "simulation output directory (compare; default: --output)");
  app.add_option("--level", c.level, "family-wise test level (compare)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Harmonic chain simulator and invariant-measure verifier", "hmix"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value configuration file; flags win");
  app.require_subcommand(1);
  app.fallthrough();
  add_common_options(app, config);
  app.add_subcommand("simulate", "run trajectories and write occupation statistics");
  app.add_subcommand("sample-exact", "draw configurations from the invariant measure");
  app.add_subcommand("verify", "check the identities behind stationarity");
  app.add_subcommand("compare", "test simulation output against the invariant measure");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(kVersion) + "\n" : app.help());
      return kPass;
    }
    err << "hmix: " << e.what() << '\n';
    return kConfigError;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    resolve(config);
    if (config.command == "simulate") return cmd_simulate(config, err);
    if (config.command == "sample-exact") return cmd_sample_exact(config, err);
    if (config.command == "verify") return cmd_verify(config, err);
    return cmd_compare(config, err);
  } catch (const ParameterError& e) {
    err << "hmix: invalid " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "hmix: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace hmix::cli
