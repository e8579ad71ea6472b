#include "hmix/stats/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "hmix/exact/mixture.hpp"

namespace hmix::stats {

namespace {

double z_score(double value, double exact, double se) {
  if (se > 0.0) return (value - exact) / se;
  return value == exact ? 0.0 : std::copysign(INFINITY, value - exact);
}

}  // namespace

double ProfileReport::max_abs_mean_z() const {
  double m = 0.0;
  for (const auto& s : sites) m = std::max(m, std::abs(s.z));
  return m;
}

double ProfileReport::max_abs_cov_z() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, std::abs(p.z));
  return m;
}

bool ProfileReport::means_agree(double z_limit, double allowance) const {
  return std::all_of(sites.begin(), sites.end(),
                     [&](const SiteRow& s) { return std::abs(s.mean - s.exact) <= z_limit * s.se + allowance; });
}

bool ProfileReport::covariances_agree(double z_limit) const {
  return std::all_of(pairs.begin(), pairs.end(), [&](const PairRow& p) { return std::abs(p.z) <= z_limit; });
}

bool ProfileReport::off_diagonal_positive() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const PairRow& p) { return p.x == p.y || p.cov > 0.0; });
}

void to_json(nlohmann::json& j, const ProfileReport& r) {
  j = nlohmann::json::object();
  for (const auto& s : r.sites)
    j["sites"].push_back({{"site", s.site}, {"mean", s.mean}, {"se", s.se}, {"exact", s.exact}, {"z", s.z}});
  for (const auto& p : r.pairs)
    j["pairs"].push_back(
        {{"x", p.x}, {"y", p.y}, {"cov", p.cov}, {"se", p.se}, {"exact", p.exact}, {"z", p.z}});
}

ProfileReport profile_report(const sim::OccupationStats& stats, const MixtureSpec& spec) {
  if (stats.sites != spec.n()) throw std::invalid_argument("profile_report: site count mismatch");
  if (!(stats.total_time > 0.0)) throw std::invalid_argument("profile_report: no post-burn-in time");
  const auto exact = exact::moment_profile(spec);
  ProfileReport r;
  for (int x = 0; x < stats.sites; ++x) {
    const double m = stats.mean(x), se = stats.mean_se(x), e = exact.means[x];
    r.sites.push_back({x + 1, m, se, e, z_score(m, e, se)});
  }
  for (int x = 0; x < stats.sites; ++x)
    for (int y = x; y < stats.sites; ++y) {
      const double c = stats.covariance(x, y), se = stats.covariance_se(x, y), e = exact.covariance[x][y];
      r.pairs.push_back({x + 1, y + 1, c, se, e, z_score(c, e, se)});
    }
  return r;
}

ProfileReport profile_report(const std::vector<std::vector<double>>& samples, const MixtureSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.n());
  if (samples.size() < 2) throw std::invalid_argument("profile_report: need at least two samples");
  const auto exact = exact::moment_profile(spec);
  const double count = static_cast<double>(samples.size());

  std::vector<double> mean(n, 0.0);
  for (const auto& row : samples) {
    if (row.size() != n) throw std::invalid_argument("profile_report: sample width mismatch");
    for (std::size_t x = 0; x < n; ++x) mean[x] += row[x];
  }
  for (double& m : mean) m /= count;

  std::vector<double> prod_sum(n * n, 0.0), prod_sq(n * n, 0.0);
  for (const auto& row : samples)
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x; y < n; ++y) {
        const double p = (row[x] - mean[x]) * (row[y] - mean[y]);
        prod_sum[x * n + y] += p;
        prod_sq[x * n + y] += p * p;
      }

  ProfileReport r;
  for (std::size_t x = 0; x < n; ++x) {
    const double var = prod_sum[x * n + x] / (count - 1.0);
    const double se = std::sqrt(var / count);
    r.sites.push_back({static_cast<int>(x + 1), mean[x], se, exact.means[x], z_score(mean[x], exact.means[x], se)});
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) {
      const double c = prod_sum[x * n + y] / count;
      const double var = std::max(0.0, prod_sq[x * n + y] / count - c * c);
      const double se = std::sqrt(var / count);
      const double e = exact.covariance[x][y];
      r.pairs.push_back({static_cast<int>(x + 1), static_cast<int>(y + 1), c, se, e, z_score(c, e, se)});
    }
  return r;
}

void write_profile_csv(std::ostream& out, const ProfileReport& report) {
  out << "site,emp_mean,se,exact_mean,z\n";
  char buf[160];
  for (const auto& s : report.sites) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.6g,%.12g,%.4f\n", s.site, s.mean, s.se, s.exact, s.z);
    out << buf;
  }
}

void write_covariance_csv(std::ostream& out, const ProfileReport& report) {
  out << "x,y,emp_cov,se,exact_cov,z\n";
  char buf[160];
  for (const auto& p : report.pairs) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.6g,%.12g,%.4f\n", p.x, p.y, p.cov, p.se, p.exact, p.z);
    out << buf;
  }
}

}  // namespace hmix::stats
