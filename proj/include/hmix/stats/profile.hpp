#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hmix/core/params.hpp"
#include "hmix/sim/occupation.hpp"

namespace hmix::stats {

struct SiteRow {
  int site = 0;  ///< 1-based
  double mean = 0.0, se = 0.0, exact = 0.0, z = 0.0;
};

struct PairRow {
  int x = 0, y = 0;  ///< 1-based, x <= y
  double cov = 0.0, se = 0.0, exact = 0.0, z = 0.0;
};

/// Empirical moments against the exact moment profile of the mixture.
struct ProfileReport {
  std::vector<SiteRow> sites;
  std::vector<PairRow> pairs;

  double max_abs_mean_z() const;
  double max_abs_cov_z() const;
  /// Every mean within z_limit SEs of the exact value plus `allowance`.
  bool means_agree(double z_limit = 4.0, double allowance = 0.0) const;
  /// Every covariance (diagonal included) within z_limit SEs.
  bool covariances_agree(double z_limit = 4.0) const;
  /// Every off-diagonal empirical covariance is strictly positive.
  bool off_diagonal_positive() const;
};

void to_json(nlohmann::json& j, const ProfileReport& r);

/// Time-weighted statistics against the mixture's moment profile.
ProfileReport profile_report(const sim::OccupationStats& stats, const MixtureSpec& spec);

/// I.i.d. samples (one configuration per row) against the moment profile.
/// Covariance SEs use the sample variance of the centred products.
ProfileReport profile_report(const std::vector<std::vector<double>>& samples, const MixtureSpec& spec);

void write_profile_csv(std::ostream& out, const ProfileReport& report);
void write_covariance_csv(std::ostream& out, const ProfileReport& report);

}  // namespace hmix::stats
