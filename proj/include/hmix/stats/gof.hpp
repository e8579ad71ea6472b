#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hmix/sim/occupation.hpp"

namespace hmix::stats {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v) noexcept;

/// Outcome of one goodness-of-fit test.
struct GofResult {
  std::string test;      ///< "chi-square" or "ks"
  std::string subject;   ///< e.g. "site 3"
  double statistic = 0.0;
  double dof = 0.0;      ///< chi-square degrees of freedom, or the KS sample size
  double p_value = 1.0;
  double effective_samples = 0.0;
  double level = 0.01;   ///< per-test level after any multiplicity correction
  std::string binning;
  Verdict verdict = Verdict::Inconclusive;
};

void to_json(nlohmann::json& j, const GofResult& r);

/// Below this many effective samples a test is reported as inconclusive.
inline constexpr double kMinEffectiveSamples = 100.0;

/// P(K > lambda) for the Kolmogorov limit law.
double kolmogorov_survival(double lambda);

/// KS p-value for statistic d at sample size n, with Stephens' finite-n
/// scaling (sqrt(n) + 0.12 + 0.11/sqrt(n)) d.
double ks_p_value(double d, double n);

/// Chi-square test of observed proportions against expected probabilities,
/// both indexed 0..K-1. Mass not covered by `expected` forms a tail cell
/// matched against the remaining observed mass. Counts are n_eff times the
/// proportions; adjacent cells are merged until every expected count is >= 5.
GofResult chi_square_test(std::span<const double> observed, std::span<const double> expected, double n_eff,
                          double level = 0.01);

/// Chi-square test of a time-weighted integer histogram (site x of `stats`)
/// against pmf(k), using the site's effective sample size.
GofResult chi_square_discrete(const sim::OccupationStats& stats, int x,
                              const std::function<double(std::int64_t)>& pmf, double level = 0.01);

/// KS distance of a binned weighted sample against `cdf`, evaluated at the
/// bin edges, with the p-value at the site's effective sample size.
GofResult ks_continuous(const sim::OccupationStats& stats, int x, const std::function<double(double)>& cdf,
                        double level = 0.01);

/// Exact KS test of i.i.d. samples against `cdf`.
GofResult ks_samples(std::vector<double> samples, const std::function<double(double)>& cdf, double level = 0.01);

void write_gof_csv(std::ostream& out, std::span<const GofResult> results);

}  // namespace hmix::stats
