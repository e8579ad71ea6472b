#pragma once

#include <cstdint>
#include <optional>

#include "hmix/core/config.hpp"
#include "hmix/core/params.hpp"
#include "hmix/core/rng.hpp"
#include "hmix/sim/common.hpp"

namespace hmix::sim {

/// k in [1, n] with probability (1/k) / H(n): the size of a removal batch
/// from a site holding n particles.
std::int64_t sample_k_harmonic(std::int64_t n, Rng& rng);

/// Logarithmic law P(k) = beta^k / (k (-log(1 - beta))), k >= 1: the size of
/// an injected batch. Kemp's two-uniform inversion.
class LogarithmicSampler {
 public:
  explicit LogarithmicSampler(double beta);
  std::int64_t operator()(Rng& rng) const;
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
  double log_complement_;  // log(1 - beta)
};

std::int64_t sample_k_logarithmic(double beta, Rng& rng);

/// Exact event-driven simulator of the discrete harmonic chain.
///
/// Channels 2x and 2x+1 move particles from site x to the left and right
/// (into the reservoir at the chain ends), each at rate H(eta_x). Channels
/// 2N and 2N+1 inject at sites 1 and N with rates -log(1 - beta_A/B).
class DiscreteSimulator {
 public:
  DiscreteSimulator(const ChainParams& params, DiscreteConfig initial = {},
                    RateTable::Strategy selection = RateTable::Strategy::Auto);

  /// Draws the holding time, advances the clock and fires one channel.
  double step(Rng& rng);

  double holding_time(Rng& rng) const { return rng.exponential() / rates_.total(); }
  void advance(double dt) noexcept { time_ += dt; }
  void fire(Rng& rng);

  const DiscreteConfig& config() const noexcept { return config_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::size_t>& bins() const noexcept { return bins_; }
  double time() const noexcept { return time_; }
  const Event& last_event() const noexcept { return last_; }

  double total_rate() const noexcept { return rates_.total(); }
  double recomputed_total_rate() const noexcept { return rates_.recomputed_total(); }
  double channel_rate(std::size_t channel) const noexcept { return rates_.rate(channel); }
  std::size_t channels() const noexcept { return rates_.size(); }
  void refresh_rates() noexcept { rates_.refresh(); }

 private:
  void set_site(std::size_t x, std::int64_t value);

  ChainParams params_;
  DiscreteConfig config_;
  std::vector<double> values_;
  std::vector<std::size_t> bins_;
  RateTable rates_;
  LogarithmicSampler inject_a_, inject_b_;
  double time_ = 0.0;
  Event last_;
};

struct DiscreteRunOptions : RunOptions {
  std::optional<DiscreteConfig> initial;  ///< defaults to the empty chain
  std::size_t thresholds = 8;             ///< indicators {eta_x <= j}, j < thresholds
};

/// Runs until t_max and returns time-weighted statistics after burn_in.
SimulationResult simulate(const ChainParams& params, const DiscreteRunOptions& options, Rng& rng);

}  // namespace hmix::sim
