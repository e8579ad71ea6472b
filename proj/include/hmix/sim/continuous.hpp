#pragma once

#include <cstdint>
#include <optional>

#include "hmix/core/config.hpp"
#include "hmix/core/params.hpp"
#include "hmix/core/rng.hpp"
#include "hmix/sim/common.hpp"

namespace hmix::sim {

/// alpha = eps (z/eps)^U: density 1/(alpha ln(z/eps)) on [eps, z].
/// Throws std::invalid_argument unless z > eps > 0.
double sample_alpha_removal(double z, double epsilon, Rng& rng);

/// Jump sizes with density e^{-a/T} / (a E1(eps/T)) on [eps, inf).
///
/// Mixture-rejection with split point s = max(eps, T): on [eps, s] propose
/// from 1/a and accept with e^{-a/T}; on [s, inf) propose s + Exp(T) and
/// accept with s/a. Branches are chosen by their exact masses.
class InjectionSampler {
 public:
  InjectionSampler(double temperature, double epsilon);

  double operator()(Rng& rng);

  double temperature() const noexcept { return t_; }
  double epsilon() const noexcept { return eps_; }
  /// E1(eps/T), the total rate of the truncated measure.
  double rate() const noexcept { return rate_; }

  std::uint64_t proposals() const noexcept { return proposals_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  double acceptance() const noexcept {
    return proposals_ ? static_cast<double>(accepted_) / static_cast<double>(proposals_) : 1.0;
  }

 private:
  double t_, eps_, split_;
  double rate_;
  double low_mass_fraction_;
  double log_span_;  // ln(split/eps)
  std::uint64_t proposals_ = 0, accepted_ = 0;
};

double sample_alpha_injection(double temperature, double epsilon, Rng& rng);

/// Cutoff-truncated event-driven simulator of the continuous energy chain.
///
/// Channels 2x and 2x+1 move energy from site x to the left and right at rate
/// ln(z_x/eps) (zero when z_x <= eps). Channels 2N and 2N+1 inject at rates
/// E1(eps/T_A) and E1(eps/T_B).
class ContinuousSimulator {
 public:
  ContinuousSimulator(const ChainParams& params, double epsilon, Binning binning, ContinuousConfig initial = {},
                      RateTable::Strategy selection = RateTable::Strategy::Auto);

  double step(Rng& rng);

  double holding_time(Rng& rng) const { return rng.exponential() / rates_.total(); }
  void advance(double dt) noexcept { time_ += dt; }
  void fire(Rng& rng);

  const ContinuousConfig& config() const noexcept { return config_; }
  const std::vector<double>& values() const noexcept { return config_.z; }
  const std::vector<std::size_t>& bins() const noexcept { return bins_; }
  double time() const noexcept { return time_; }
  double epsilon() const noexcept { return eps_; }
  const Event& last_event() const noexcept { return last_; }

  double total_rate() const noexcept { return rates_.total(); }
  double recomputed_total_rate() const noexcept { return rates_.recomputed_total(); }
  double channel_rate(std::size_t channel) const noexcept { return rates_.rate(channel); }
  std::size_t channels() const noexcept { return rates_.size(); }
  void refresh_rates() noexcept { rates_.refresh(); }

  const InjectionSampler& injector_a() const noexcept { return inject_a_; }
  const InjectionSampler& injector_b() const noexcept { return inject_b_; }

 private:
  void set_site(std::size_t x, double value);

  ChainParams params_;
  double eps_;
  Binning binning_;
  ContinuousConfig config_;
  std::vector<std::size_t> bins_;
  RateTable rates_;
  InjectionSampler inject_a_, inject_b_;
  double time_ = 0.0;
  Event last_;
};

struct ContinuousRunOptions : RunOptions {
  double epsilon = 0.0;  ///< 0 selects default_epsilon(params)
  std::size_t bins = 400;
  std::optional<ContinuousConfig> initial;
};

struct ContinuousResult : SimulationResult {
  double epsilon = 0.0;
  double acceptance_a = 1.0, acceptance_b = 1.0;
};

double default_epsilon(const ChainParams& params);

/// Log-spaced bins on [10 eps, 50 T_B] plus underflow and overflow.
Binning default_binning(const ChainParams& params, double epsilon, std::size_t bins = 400);

/// Bin indices j whose indicators {z <= upper_edge(j)} are tracked: the bins
/// holding sqrt(T_A T_B) 2^k for k = -3..2.
std::vector<std::size_t> default_threshold_bins(const ChainParams& params, const Binning& binning);

ContinuousResult simulate_continuous(const ChainParams& params, const ContinuousRunOptions& options, Rng& rng);

}  // namespace hmix::sim
