#pragma once

#include <span>

namespace hmix {

/// Integrated autocorrelation time tau = 1 + 2 sum_k rho_k of a stationary
/// series, by Geyer's initial positive sequence estimator: pairs
/// rho_{2m} + rho_{2m+1} are summed while they stay positive. A constant
/// series returns 1.
double integrated_autocorr_time(std::span<const double> series);

/// Variance of the series mean, var * tau / n.
double variance_of_mean(std::span<const double> series);

}  // namespace hmix
