#include "hmix/sim/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driver.hpp"
#include "hmix/core/numerics.hpp"

namespace hmix::sim {

std::int64_t sample_k_harmonic(std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_k_harmonic: n must be >= 1");
  if (n == 1) return 1;
  const auto& table = harmonic_table();
  const auto count = static_cast<std::uint64_t>(n);
  const double target = rng.uniform() * table(count);
  // smallest k with H(k) > target
  if (count <= table.bound()) {
    const auto h = table.values();
    if (count <= 16) {
      for (std::uint64_t k = 1; k < count; ++k)
        if (h[k] > target) return static_cast<std::int64_t>(k);
      return n;
    }
    const auto it = std::upper_bound(h.begin() + 1, h.begin() + static_cast<std::ptrdiff_t>(count) + 1, target);
    return std::min<std::int64_t>(it - h.begin(), n);
  }
  std::uint64_t lo = 1, hi = count;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (table(mid) > target) hi = mid;
    else lo = mid + 1;
  }
  return static_cast<std::int64_t>(lo);
}

LogarithmicSampler::LogarithmicSampler(double beta) : beta_(beta), log_complement_(std::log1p(-beta)) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("LogarithmicSampler: beta must lie in (0,1)");
}

std::int64_t LogarithmicSampler::operator()(Rng& rng) const {
  for (;;) {
    const double v = rng.uniform_open();
    if (v >= beta_) return 1;
    const double q = -std::expm1(log_complement_ * rng.uniform_open());
    if (v <= q * q) {
      const double k = std::floor(1.0 + std::log(v) / std::log(q));
      if (!(k >= 1.0) || k > 9.0e18) continue;
      return static_cast<std::int64_t>(k);
    }
    return v >= q ? 1 : 2;
  }
}

std::int64_t sample_k_logarithmic(double beta, Rng& rng) { return LogarithmicSampler(beta)(rng); }

// ---------------------------------------------------------------------------

DiscreteSimulator::DiscreteSimulator(const ChainParams& params, DiscreteConfig initial,
                                     RateTable::Strategy selection)
    : params_(params),
      config_(std::move(initial)),
      rates_(2 * static_cast<std::size_t>(params.n()) + 2, selection),
      inject_a_(params.beta_a()),
      inject_b_(params.beta_b()) {
  const auto n = static_cast<std::size_t>(params.n());
  if (config_.eta.empty()) config_.eta.assign(n, 0);
  if (config_.size() != n) throw std::invalid_argument("initial configuration has the wrong length");
  values_.assign(n, 0.0);
  bins_.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (config_.eta[x] < 0) throw std::invalid_argument("initial configuration has a negative entry");
    set_site(x, config_.eta[x]);
  }
  rates_.set(2 * n, params.injection_rate_a());
  rates_.set(2 * n + 1, params.injection_rate_b());
  rates_.refresh();
}

void DiscreteSimulator::set_site(std::size_t x, std::int64_t value) {
  config_.eta[x] = value;
  values_[x] = static_cast<double>(value);
  bins_[x] = static_cast<std::size_t>(value);
  const double h = harmonic_number(static_cast<std::uint64_t>(value));
  rates_.set(2 * x, h);
  rates_.set(2 * x + 1, h);
}

double DiscreteSimulator::step(Rng& rng) {
  const double dt = holding_time(rng);
  advance(dt);
  fire(rng);
  return dt;
}

void DiscreteSimulator::fire(Rng& rng) {
  const auto n = static_cast<std::size_t>(params_.n());
  const std::size_t channel = rates_.select(rng.uniform() * rates_.total());
  last_.time = time_;

  if (channel >= 2 * n) {
    const bool left = channel == 2 * n;
    const std::int64_t k = left ? inject_a_(rng) : inject_b_(rng);
    const std::size_t site = left ? 0 : n - 1;
    set_site(site, config_.eta[site] + k);
    last_ = {time_, EventKind::Injection, left ? -1 : static_cast<int>(n), static_cast<int>(site),
             static_cast<double>(k)};
    return;
  }

  const std::size_t x = channel / 2;
  const bool to_left = channel % 2 == 0;
  const std::int64_t occupancy = config_.eta[x];
  if (occupancy < 1) throw std::logic_error("DiscreteSimulator: removal channel fired from an empty site");
  const std::int64_t k = sample_k_harmonic(occupancy, rng);
  set_site(x, occupancy - k);

  const int from = static_cast<int>(x);
  const int to = to_left ? from - 1 : from + 1;
  if (to < 0 || to >= params_.n()) {
    last_ = {time_, EventKind::Extraction, from, to, static_cast<double>(k)};
    return;
  }
  const auto target = static_cast<std::size_t>(to);
  set_site(target, config_.eta[target] + k);
  last_ = {time_, EventKind::Bulk, from, to, static_cast<double>(k)};
}

SimulationResult simulate(const ChainParams& params, const DiscreteRunOptions& options, Rng& rng) {
  DiscreteSimulator sim(params, options.initial.value_or(DiscreteConfig{}), options.selection);
  std::vector<std::size_t> thresholds(options.thresholds);
  for (std::size_t j = 0; j < thresholds.size(); ++j) thresholds[j] = j;
  OccupationAccumulator acc(params.n(), Binning::integer(), options.burn_in, options.t_max, options.batches,
                            std::move(thresholds));
  return detail::run(sim, acc, options, rng);
}

}  // namespace hmix::sim
