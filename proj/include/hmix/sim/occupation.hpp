#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hmix::sim {

/// Histogram layout for time-weighted occupation statistics.
///
/// Integer binning: bin k holds the time spent with exactly k particles
/// (the histogram grows as needed). Log binning: bin 0 is [0, lo), bins
/// 1..count split [lo, hi) geometrically, bin count+1 is [hi, inf).
struct Binning {
  enum class Kind { Integer, Log };
  Kind kind = Kind::Integer;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  static Binning integer() { return {}; }
  static Binning log_spaced(double lo, double hi, std::size_t count);

  std::size_t index(double value) const noexcept;
  /// Upper edge of bin `i` (k + 1 for integer bins).
  double upper_edge(std::size_t i) const noexcept;
  std::size_t size() const noexcept { return kind == Kind::Integer ? 0 : count + 2; }

  friend bool operator==(const Binning&, const Binning&) = default;
};

/// Boundary and bulk transport counters, in particles or energy.
struct FluxCounters {
  double injected_a = 0.0, extracted_a = 0.0;
  double injected_b = 0.0, extracted_b = 0.0;
  std::vector<double> bond_current;  ///< net left-to-right transfer across bond (x, x+1)

  void merge(const FluxCounters& other);
};

/// Time-weighted statistics of a trajectory after burn-in.
///
/// All fields are sums over time (or variances of such sums), so merging
/// independent replicas is elementwise addition. Variances come from batch
/// means corrected by the integrated autocorrelation time of the batch series.
struct OccupationStats {
  int sites = 0;
  Binning binning;
  double total_time = 0.0;
  std::uint64_t events = 0;  ///< events after burn-in

  std::vector<double> site_integral;           ///< int v_x dt
  std::vector<double> pair_integral;           ///< int v_x v_y dt, row-major N x N
  std::vector<std::vector<double>> histogram;  ///< time per bin, per site

  std::vector<double> var_site_integral;  ///< Var(int v_x dt)
  std::vector<double> var_pair_integral;  ///< Var of the linearized covariance integral

  std::vector<std::size_t> threshold_bins;     ///< indicator {bin <= b} observables
  std::vector<double> var_threshold_integral;  ///< N x J

  FluxCounters flux;
  std::size_t replicas = 1;

  double mean(int x) const;
  double mean_se(int x) const;
  double covariance(int x, int y) const;
  double covariance_se(int x, int y) const;
  /// Time fraction in each bin of site x.
  std::vector<double> distribution(int x) const;
  /// Effective number of independent samples for site x: the smallest
  /// Var_pi(f) T^2 / Var(int f dt) over the site mean and the tracked
  /// indicator observables with probability in [0.01, 0.99].
  double effective_samples(int x) const;

  void merge(const OccupationStats& other);
};

void to_json(nlohmann::json& j, const Binning& b);
void from_json(const nlohmann::json& j, Binning& b);
void to_json(nlohmann::json& j, const OccupationStats& s);
void from_json(const nlohmann::json& j, OccupationStats& s);

/// Builds OccupationStats from holding intervals. The post-burn-in window is
/// cut into equal-duration batches; batch sums feed the variance estimates.
class OccupationAccumulator {
 public:
  OccupationAccumulator(int sites, Binning binning, double burn_in, double t_max,
                        std::size_t batches, std::vector<std::size_t> threshold_bins);

  /// The state `values` (with histogram bins `bins`) held on [start, start + duration).
  void add(std::span<const double> values, std::span<const std::size_t> bins, double start,
           double duration);

  bool observing(double time) const noexcept { return time >= burn_in_; }
  FluxCounters& flux() noexcept { return flux_; }
  void count_event() noexcept { ++events_; }

  OccupationStats finalize() const;

  /// z-scores comparing first-half and second-half batch means per site.
  std::vector<double> stationarity_z() const;

 private:
  void accumulate(std::span<const double> values, std::span<const std::size_t> bins, double dt);
  void close_batch();

  int sites_;
  Binning binning_;
  double burn_in_, t_max_;
  std::size_t batch_count_;
  double batch_length_;
  std::vector<std::size_t> thresholds_;

  std::size_t current_batch_ = 0;
  double batch_end_;
  std::vector<double> batch_site_, batch_pair_;
  std::vector<std::vector<double>> histogram_;
  std::vector<double> threshold_snapshot_;

  // closed batches, flattened
  std::vector<double> series_site_, series_pair_, series_threshold_;
  std::vector<double> series_duration_;

  FluxCounters flux_;
  std::uint64_t events_ = 0;
};

}  // namespace hmix::sim
