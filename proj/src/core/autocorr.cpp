#include "hmix/core/autocorr.hpp"

#include <cstddef>
#include <vector>

namespace hmix {

namespace {

double autocovariance(std::span<const double> centered, std::size_t lag) {
  const std::size_t n = centered.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + lag < n; ++i) sum += centered[i] * centered[i + lag];
  return sum / static_cast<double>(n);
}

}  // namespace

double integrated_autocorr_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 1.0;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

  const double gamma0 = autocovariance(centered, 0);
  if (!(gamma0 > 0.0)) return 1.0;

  double sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n / 2; ++m) {
    const double pair = autocovariance(centered, 2 * m) + autocovariance(centered, 2 * m + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  if (sum <= 0.0) return 1.0;
  return (2.0 * sum - gamma0) / gamma0;
}

double variance_of_mean(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  return var * integrated_autocorr_time(series) / static_cast<double>(n);
}

}  // namespace hmix
