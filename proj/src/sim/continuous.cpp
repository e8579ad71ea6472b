#include "hmix/sim/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driver.hpp"
#include "hmix/core/numerics.hpp"

namespace hmix::sim {

double sample_alpha_removal(double z, double epsilon, Rng& rng) {
  if (!(epsilon > 0.0 && z > epsilon)) throw std::invalid_argument("sample_alpha_removal: need z > epsilon > 0");
  const double alpha = epsilon * std::exp(rng.uniform() * std::log(z / epsilon));
  return std::clamp(alpha, epsilon, z);
}

InjectionSampler::InjectionSampler(double temperature, double epsilon)
    : t_(temperature), eps_(epsilon), split_(std::max(epsilon, temperature)) {
  if (!(temperature > 0.0 && epsilon > 0.0)) throw std::invalid_argument("InjectionSampler: need T > 0, epsilon > 0");
  rate_ = exp_integral_e1(eps_ / t_);
  // mass on [eps, split] is E1(eps/T) - E1(split/T)
  const double high = exp_integral_e1(split_ / t_);
  low_mass_fraction_ = (rate_ - high) / rate_;
  log_span_ = std::log(split_ / eps_);
}

double InjectionSampler::operator()(Rng& rng) {
  const bool low = rng.uniform() < low_mass_fraction_;
  for (;;) {
    ++proposals_;
    if (low) {
      const double alpha = eps_ * std::exp(rng.uniform() * log_span_);
      if (rng.uniform() < std::exp(-alpha / t_)) {
        ++accepted_;
        return alpha;
      }
    } else {
      const double alpha = split_ + t_ * rng.exponential();
      if (rng.uniform() * alpha < split_) {
        ++accepted_;
        return alpha;
      }
    }
  }
}

double sample_alpha_injection(double temperature, double epsilon, Rng& rng) {
  return InjectionSampler(temperature, epsilon)(rng);
}

// ---------------------------------------------------------------------------

ContinuousSimulator::ContinuousSimulator(const ChainParams& params, double epsilon, Binning binning,
                                         ContinuousConfig initial, RateTable::Strategy selection)
    : params_(params),
      eps_(epsilon),
      binning_(binning),
      config_(std::move(initial)),
      rates_(2 * static_cast<std::size_t>(params.n()) + 2, selection),
      inject_a_(params.t_a(), epsilon),
      inject_b_(params.t_b(), epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ContinuousSimulator: epsilon must be positive");
  const auto n = static_cast<std::size_t>(params.n());
  if (config_.z.empty()) config_.z.assign(n, 0.0);
  if (config_.size() != n) throw std::invalid_argument("initial configuration has the wrong length");
  bins_.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (!(config_.z[x] >= 0.0)) throw std::invalid_argument("initial configuration has a negative entry");
    set_site(x, config_.z[x]);
  }
  rates_.set(2 * n, inject_a_.rate());
  rates_.set(2 * n + 1, inject_b_.rate());
  rates_.refresh();
}

void ContinuousSimulator::set_site(std::size_t x, double value) {
  config_.z[x] = value;
  bins_[x] = binning_.index(value);
  const double r = value > eps_ ? std::log(value / eps_) : 0.0;
  rates_.set(2 * x, r);
  rates_.set(2 * x + 1, r);
}

double ContinuousSimulator::step(Rng& rng) {
  const double dt = holding_time(rng);
  advance(dt);
  fire(rng);
  return dt;
}

void ContinuousSimulator::fire(Rng& rng) {
  const auto n = static_cast<std::size_t>(params_.n());
  const std::size_t channel = rates_.select(rng.uniform() * rates_.total());

  if (channel >= 2 * n) {
    const bool left = channel == 2 * n;
    const double alpha = left ? inject_a_(rng) : inject_b_(rng);
    const std::size_t site = left ? 0 : n - 1;
    set_site(site, config_.z[site] + alpha);
    last_ = {time_, EventKind::Injection, left ? -1 : static_cast<int>(n), static_cast<int>(site), alpha};
    return;
  }

  const std::size_t x = channel / 2;
  const bool to_left = channel % 2 == 0;
  const double z = config_.z[x];
  const double alpha = sample_alpha_removal(z, eps_, rng);
  const double remaining = z - alpha;
  if (remaining < 0.0) throw std::logic_error("ContinuousSimulator: removal left a negative energy");
  set_site(x, remaining);

  const int from = static_cast<int>(x);
  const int to = to_left ? from - 1 : from + 1;
  if (to < 0 || to >= params_.n()) {
    last_ = {time_, EventKind::Extraction, from, to, alpha};
    return;
  }
  const auto target = static_cast<std::size_t>(to);
  set_site(target, config_.z[target] + alpha);
  last_ = {time_, EventKind::Bulk, from, to, alpha};
}

double default_epsilon(const ChainParams& params) { return 1e-6 * std::min(params.t_a(), 1.0); }

Binning default_binning(const ChainParams& params, double epsilon, std::size_t bins) {
  return Binning::log_spaced(10.0 * epsilon, 50.0 * std::max(params.t_a(), params.t_b()), bins);
}

std::vector<std::size_t> default_threshold_bins(const ChainParams& params, const Binning& binning) {
  const double centre = std::sqrt(params.t_a() * params.t_b());
  std::vector<std::size_t> out;
  for (int k = -3; k <= 2; ++k) {
    const std::size_t j = binning.index(std::ldexp(centre, k));
    if (out.empty() || out.back() != j) out.push_back(j);
  }
  return out;
}

ContinuousResult simulate_continuous(const ChainParams& params, const ContinuousRunOptions& options, Rng& rng) {
  const double eps = options.epsilon > 0.0 ? options.epsilon : default_epsilon(params);
  const Binning binning = default_binning(params, eps, options.bins);
  ContinuousSimulator sim(params, eps, binning, options.initial.value_or(ContinuousConfig{}), options.selection);
  OccupationAccumulator acc(params.n(), binning, options.burn_in, options.t_max, options.batches,
                            default_threshold_bins(params, binning));
  ContinuousResult result;
  static_cast<SimulationResult&>(result) = detail::run(sim, acc, options, rng);
  result.epsilon = eps;
  result.acceptance_a = sim.injector_a().acceptance();
  result.acceptance_b = sim.injector_b().acceptance();
  return result;
}

}  // namespace hmix::sim
