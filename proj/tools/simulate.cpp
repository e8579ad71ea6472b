#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hmix/exact/mixture.hpp"
#include "hmix/sim/continuous.hpp"
#include "hmix/sim/discrete.hpp"
#include "hmix/stats/gof.hpp"
#include "hmix/stats/profile.hpp"
#include "hmix_cli.hpp"
#include "output.hpp"

namespace hmix::cli {

namespace {

struct Replica {
  sim::OccupationStats stats;
  std::uint64_t events = 0;
  double wall_seconds = 0.0;
  std::vector<double> stationarity_z;
  double epsilon = 0.0;
  double acceptance_a = 1.0, acceptance_b = 1.0;
};

Replica run_replica(const RunConfig& c, const ChainParams& params, std::uint64_t stream) {
  Rng rng(c.seed, stream);
  Replica out;
  if (c.model == Model::Discrete) {
    sim::DiscreteRunOptions o;
    o.t_max = c.t_max;
    o.burn_in = c.burn_in;
    o.batches = c.batches;
    auto r = sim::simulate(params, o, rng);
    out.stats = std::move(r.stats);
    out.events = r.total_events;
    out.wall_seconds = r.wall_seconds;
    out.stationarity_z = std::move(r.stationarity_z);
  } else {
    sim::ContinuousRunOptions o;
    o.t_max = c.t_max;
    o.burn_in = c.burn_in;
    o.batches = c.batches;
    o.epsilon = c.epsilon;
    o.bins = c.bins;
    auto r = sim::simulate_continuous(params, o, rng);
    out.stats = std::move(r.stats);
    out.events = r.total_events;
    out.wall_seconds = r.wall_seconds;
    out.stationarity_z = std::move(r.stationarity_z);
    out.epsilon = r.epsilon;
    out.acceptance_a = r.acceptance_a;
    out.acceptance_b = r.acceptance_b;
  }
  return out;
}

/// Runs replica r on stream r with a fixed pool of workers.
std::vector<Replica> run_replicas(const RunConfig& c, const ChainParams& params) {
  const auto count = static_cast<std::size_t>(c.replicas);
  std::vector<Replica> replicas(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        replicas[r] = run_replica(c, params, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(c.threads, count);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return replicas;
}

void write_histograms(std::ostream& out, const sim::OccupationStats& stats) {
  char buf[160];
  const bool integer = stats.binning.kind == sim::Binning::Kind::Integer;
  out << (integer ? "site,value,weight\n" : "site,bin,lower,upper,weight\n");
  for (int x = 0; x < stats.sites; ++x) {
    const auto dist = stats.distribution(x);
    double lower = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double upper = stats.binning.upper_edge(i);
      if (integer)
        std::snprintf(buf, sizeof buf, "%d,%zu,%.12g\n", x + 1, i, dist[i]);
      else
        std::snprintf(buf, sizeof buf, "%d,%zu,%.12g,%.12g,%.12g\n", x + 1, i, lower, upper, dist[i]);
      out << buf;
      lower = upper;
    }
  }
}

RunConfig config_from_meta(const nlohmann::json& meta) {
  const auto& j = meta.at("config");
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.model = model_from_string(j.at("model").get<std::string>());
  c.n = j.at("n").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (c.model == Model::Discrete) {
    c.beta_a = j.at("beta_a").get<double>();
    c.beta_b = j.at("beta_b").get<double>();
  } else {
    c.t_a = j.at("t_a").get<double>();
    c.t_b = j.at("t_b").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
  }
  return c;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  const ChainParams params = c.params();
  const MixtureSpec spec{params, c.model};
  const nlohmann::json config = c;

  auto replicas = run_replicas(c, params);
  sim::OccupationStats merged = replicas.front().stats;
  for (std::size_t r = 1; r < replicas.size(); ++r) merged.merge(replicas[r].stats);

  std::uint64_t events = 0;
  double wall = 0.0;
  nlohmann::json per_replica = nlohmann::json::array();
  std::vector<std::uint64_t> streams;
  for (std::size_t r = 0; r < replicas.size(); ++r) {
    const auto& rep = replicas[r];
    events += rep.events;
    wall += rep.wall_seconds;
    streams.push_back(r);
    nlohmann::json entry = {{"stream", r}, {"events", rep.events}, {"stationarity_z", rep.stationarity_z}};
    if (c.model == Model::Continuous) {
      entry["acceptance_a"] = rep.acceptance_a;
      entry["acceptance_b"] = rep.acceptance_b;
    }
    per_replica.push_back(entry);
  }

  const std::filesystem::path dir = c.output;
  nlohmann::json meta = {{"config", config},     {"seed", c.seed},           {"streams", streams},
                         {"version", kVersion},  {"events", events},         {"replicas", per_replica},
                         {"binning", merged.binning}};
  if (c.model == Model::Continuous) meta["epsilon"] = c.epsilon;
  write_json_file(dir, "meta.json", meta);
  write_json_file(dir, "stats.json", {{"config", config}, {"stats", merged}});

  {
    auto out = open_output(dir, "histograms.csv", config);
    write_histograms(out, merged);
  }
  const auto report = stats::profile_report(merged, spec);
  {
    auto out = open_output(dir, "profile.csv", config);
    stats::write_profile_csv(out, report);
  }
  {
    auto out = open_output(dir, "covariance.csv", config);
    stats::write_covariance_csv(out, report);
  }

  char buf[200];
  std::snprintf(buf, sizeof buf, "simulate: %d replica(s), %llu events, %.2f s, max |z| mean %.2f cov %.2f\n",
                c.replicas, static_cast<unsigned long long>(events), wall, report.max_abs_mean_z(),
                report.max_abs_cov_z());
  log << buf;
  return kPass;
}

int cmd_compare(const RunConfig& c, std::ostream& log) {
  const std::filesystem::path in = c.input;
  const auto meta = read_json(in / "meta.json");
  const auto stored = read_json(in / "stats.json");
  const RunConfig sim_config = config_from_meta(meta);
  const ChainParams params = sim_config.params();
  const MixtureSpec spec{params, sim_config.model};
  const auto merged = stored.at("stats").get<sim::OccupationStats>();

  nlohmann::json config = c;
  config["simulation"] = meta.at("config");

  const auto report = stats::profile_report(merged, spec);
  // truncating jumps below eps shifts the means by O(eps)
  const double allowance = sim_config.model == Model::Continuous ? (params.n() + 1.0) * (params.n() + 1.0) * sim_config.epsilon : 0.0;
  const bool means_ok = report.means_agree(4.0, allowance);
  const bool cov_ok = report.covariances_agree(4.0);
  const bool positive_ok = spec.degenerate() || report.off_diagonal_positive();

  const double site_level = c.level / params.n();
  std::vector<stats::GofResult> gof;
  for (int x = 0; x < params.n(); ++x) {
    if (sim_config.model == Model::Discrete)
      gof.push_back(stats::chi_square_discrete(
          merged, x, [&](std::int64_t k) { return exact::marginal_pmf_discrete(spec, x + 1, k); }, site_level));
    else
      gof.push_back(stats::ks_continuous(
          merged, x, [&](double t) { return exact::marginal_cdf_continuous(spec, x + 1, t); }, site_level));
  }

  bool gof_fail = false, gof_inconclusive = false;
  for (const auto& g : gof) {
    gof_fail = gof_fail || g.verdict == stats::Verdict::Fail;
    gof_inconclusive = gof_inconclusive || g.verdict == stats::Verdict::Inconclusive;
  }
  int code = kPass;
  if (!means_ok || !cov_ok || !positive_ok || gof_fail) code = kFailed;
  else if (gof_inconclusive) code = kInconclusive;

  const std::filesystem::path dir = c.output;
  {
    auto out = open_output(dir, "gof.csv", config);
    stats::write_gof_csv(out, gof);
  }
  {
    auto out = open_output(dir, "profile.csv", config);
    stats::write_profile_csv(out, report);
  }
  {
    auto out = open_output(dir, "covariance.csv", config);
    stats::write_covariance_csv(out, report);
  }
  write_json_file(dir, "compare.json",
                  {{"config", config},
                   {"means_agree", means_ok},
                   {"mean_allowance", allowance},
                   {"covariances_agree", cov_ok},
                   {"off_diagonal_positive", positive_ok},
                   {"max_abs_mean_z", report.max_abs_mean_z()},
                   {"max_abs_cov_z", report.max_abs_cov_z()},
                   {"site_level", site_level},
                   {"gof", gof},
                   {"profile", report},
                   {"status", code == kPass ? "pass" : code == kFailed ? "fail" : "inconclusive"}});

  char buf[200];
  std::snprintf(buf, sizeof buf, "compare: means %s, covariances %s, positivity %s, gof %s\n", means_ok ? "ok" : "FAIL",
                cov_ok ? "ok" : "FAIL", positive_ok ? "ok" : "FAIL",
                gof_fail ? "FAIL" : gof_inconclusive ? "inconclusive" : "ok");
  log << buf;
  return code;
}

}  // namespace hmix::cli
