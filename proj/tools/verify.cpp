#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hmix/verify/checks.hpp"
#include "hmix_cli.hpp"
#include "output.hpp"

namespace hmix::cli {

namespace {

void append(std::vector<verify::VerificationReport>& to, std::vector<verify::VerificationReport> from) {
  for (auto& r : from) to.push_back(std::move(r));
}

std::vector<verify::VerificationReport> telescoping(const RunConfig& c) {
  const auto discrete = ChainParams::discrete(c.n, c.beta_a, c.beta_b);
  const auto continuous = ChainParams::continuous(c.n, c.t_a, c.t_b);
  verify::TelescopingOptions o;
  if (c.tol > 0.0) o.tol = c.tol;
  o.mc_samples = c.mc_samples;
  o.seed = c.seed;
  o.impostor = c.impostor;
  if (c.lambda_grid.empty() && c.t_grid.empty()) return verify::telescoping_suite(discrete, continuous, o);

  std::vector<verify::VerificationReport> out;
  const auto n = static_cast<std::size_t>(c.n);
  for (double l : c.lambda_grid) out.push_back(verify::check_telescoping_discrete(discrete, std::vector<double>(n, l), o));
  for (double t : c.t_grid) out.push_back(verify::check_telescoping_continuous(continuous, std::vector<double>(n, t), o));
  return out;
}

verify::VerificationReport stationarity(const RunConfig& c, int n) {
  if (n > 2) throw ParameterError("n", "direct stationarity is available for N <= 2");
  verify::StationarityOptions o;
  o.k = c.k > 0 ? c.k : (n == 1 ? 200 : 60);
  o.tol = c.tol > 0.0 ? c.tol : (n == 1 ? 1e-8 : 1e-6);
  o.impostor = c.impostor;
  return verify::check_stationarity_direct_discrete(ChainParams::discrete(n, c.beta_a, c.beta_b), o);
}

std::vector<verify::VerificationReport> equilibrium(const RunConfig& c) {
  const double tol = c.tol > 0.0 ? c.tol : 1e-12;
  return {verify::check_equilibrium_limit(ChainParams::discrete(c.n, c.beta_a, c.beta_a), Model::Discrete, tol),
          verify::check_equilibrium_limit(ChainParams::continuous(c.n, c.t_a, c.t_a), Model::Continuous, tol)};
}

}  // namespace

int cmd_verify(const RunConfig& c, std::ostream& log) {
  std::vector<verify::VerificationReport> reports;
  const bool all = c.suite == "all";
  if (all || c.suite == "identities") append(reports, verify::identities_suite());
  if (all || c.suite == "telescoping") append(reports, telescoping(c));
  if (c.suite == "stationarity") reports.push_back(stationarity(c, c.n));
  if (all) {
    reports.push_back(stationarity(c, 1));
    reports.push_back(stationarity(c, 2));
  }
  if (all || c.suite == "equilibrium") append(reports, equilibrium(c));

  const nlohmann::json config = c;
  {
    auto out = open_output(c.output, "reports.jsonl", config);
    out << nlohmann::json{{"config", config}}.dump() << '\n';
    verify::write_jsonl(out, reports);
  }

  std::size_t pass = 0, fail = 0, inconclusive = 0;
  double worst = 0.0;
  for (const auto& r : reports) {
    switch (r.status()) {
      case verify::Status::Pass: ++pass; break;
      case verify::Status::Fail: ++fail; break;
      case verify::Status::Inconclusive: ++inconclusive; break;
    }
    worst = std::max(worst, r.max_residual());
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "verify %s: %zu pass, %zu fail, %zu inconclusive, max residual %.3g\n",
                c.suite.c_str(), pass, fail, inconclusive, worst);
  log << buf;
  switch (verify::overall(reports)) {
    case verify::Status::Pass: return kPass;
    case verify::Status::Fail: return kFailed;
    case verify::Status::Inconclusive: return kInconclusive;
  }
  return kRuntimeError;
}

}  // namespace hmix::cli
