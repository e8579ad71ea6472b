#include "hmix/stats/gof.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hmix::stats {

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

void to_json(nlohmann::json& j, const GofResult& r) {
  j = {{"test", r.test},         {"subject", r.subject},
       {"statistic", r.statistic}, {"dof", r.dof},
       {"p_value", r.p_value},     {"effective_samples", r.effective_samples},
       {"level", r.level},         {"binning", r.binning},
       {"verdict", to_string(r.verdict)}};
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double a = (2 * k - 1) * pi / lambda;
      cdf += std::exp(-a * a / 8.0);
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

double ks_p_value(double d, double n) {
  const double s = std::sqrt(n);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}

namespace {

Verdict decide(double p, double n_eff, double level) {
  if (!(n_eff >= kMinEffectiveSamples)) return Verdict::Inconclusive;
  return p >= level ? Verdict::Pass : Verdict::Fail;
}

std::string format_edge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

GofResult chi_square_test(std::span<const double> observed, std::span<const double> expected, double n_eff,
                          double level) {
  GofResult r;
  r.test = "chi-square";
  r.effective_samples = n_eff;
  r.level = level;

  const std::size_t k = expected.size();
  std::vector<double> obs(k, 0.0), exp(expected.begin(), expected.end());
  double obs_total = 0.0, exp_total = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (i < k) obs[i] = observed[i];
    obs_total += observed[i];
  }
  for (double e : exp) exp_total += e;
  double obs_head = 0.0;
  for (double o : obs) obs_head += o;
  // tail cell: everything beyond the listed support
  obs.push_back(std::max(0.0, obs_total - obs_head));
  exp.push_back(std::max(0.0, 1.0 - exp_total));

  std::vector<double> cell_obs, cell_exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    o_acc += obs[i];
    e_acc += exp[i];
    if (e_acc * n_eff >= 5.0) {
      cell_obs.push_back(o_acc);
      cell_exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (!cell_obs.empty()) {
    cell_obs.back() += o_acc;
    cell_exp.back() += e_acc;
  } else {
    cell_obs.push_back(o_acc);
    cell_exp.push_back(e_acc);
  }

  double stat = 0.0;
  for (std::size_t i = 0; i < cell_obs.size(); ++i) {
    const double diff = cell_obs[i] - cell_exp[i];
    stat += diff * diff / cell_exp[i];
  }
  stat *= n_eff;
  r.statistic = stat;
  r.dof = static_cast<double>(cell_obs.size()) - 1.0;
  r.binning = std::to_string(cell_obs.size()) + " merged cells from " + std::to_string(k) + " + tail";
  if (r.dof < 1.0) {
    r.p_value = 1.0;
    r.verdict = Verdict::Inconclusive;
    return r;
  }
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * stat);
  r.verdict = decide(r.p_value, n_eff, level);
  return r;
}

// TODO: replace the single n_eff scaling with a Wald statistic on the batch-means
// covariance of the cell integrals; the current test is conservative for
// cells that decorrelate faster than the site mean.
GofResult chi_square_discrete(const sim::OccupationStats& stats, int x,
                              const std::function<double(std::int64_t)>& pmf, double level) {
  if (stats.binning.kind != sim::Binning::Kind::Integer)
    throw std::invalid_argument("chi_square_discrete: integer histogram required");
  const auto observed = stats.distribution(x);
  const double n_eff = stats.effective_samples(x);
  // extend the expected support until its tail is negligible against 5 counts
  std::vector<double> expected;
  double covered = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double p = pmf(k);
    expected.push_back(p);
    covered += p;
    if (static_cast<std::size_t>(k + 1) >= observed.size() && (1.0 - covered) * n_eff < 1.0) break;
    if (k > 1'000'000) break;
  }
  GofResult r = chi_square_test(observed, expected, n_eff, level);
  r.subject = "site " + std::to_string(x + 1);
  return r;
}

GofResult ks_continuous(const sim::OccupationStats& stats, int x, const std::function<double(double)>& cdf,
                        double level) {
  if (stats.binning.kind != sim::Binning::Kind::Log) throw std::invalid_argument("ks_continuous: log histogram required");
  const auto dist = stats.distribution(x);
  const double n_eff = stats.effective_samples(x);
  GofResult r;
  r.test = "ks";
  r.subject = "site " + std::to_string(x + 1);
  r.effective_samples = n_eff;
  r.level = level;
  r.binning = "log " + std::to_string(stats.binning.count) + " on [" + format_edge(stats.binning.lo) + ", " +
              format_edge(stats.binning.hi) + ")";
  double cumulative = 0.0, d = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    cumulative += dist[i];
    d = std::max(d, std::abs(cumulative - cdf(stats.binning.upper_edge(i))));
  }
  r.statistic = d;
  r.dof = n_eff;
  r.p_value = ks_p_value(d, n_eff);
  r.verdict = decide(r.p_value, n_eff, level);
  return r;
}

GofResult ks_samples(std::vector<double> samples, const std::function<double(double)>& cdf, double level) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  GofResult r;
  r.test = "ks";
  r.statistic = d;
  r.dof = n;
  r.effective_samples = n;
  r.level = level;
  r.binning = "unbinned";
  r.p_value = ks_p_value(d, n);
  r.verdict = decide(r.p_value, n, level);
  return r;
}

void write_gof_csv(std::ostream& out, std::span<const GofResult> results) {
  out << "test,subject,statistic,dof,p_value,effective_samples,level,verdict,binning\n";
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%.10g,%.10g,%.6g,%s,", r.test.c_str(), r.subject.c_str(),
                  r.statistic, r.dof, r.p_value, r.effective_samples, r.level, to_string(r.verdict));
    out << buf << '"' << r.binning << "\"\n";
  }
}

}  // namespace hmix::stats
