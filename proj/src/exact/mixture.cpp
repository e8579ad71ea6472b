#include "hmix/exact/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hmix/core/quadrature.hpp"

namespace hmix::exact {

double log_geometric_pmf(double m, std::int64_t k) {
  if (!(m > 0.0)) throw std::domain_error("geometric_pmf: mean must be > 0");
  if (k < 0) return -INFINITY;
  const double log1pm = std::log1p(m);
  return -log1pm + static_cast<double>(k) * (std::log(m) - log1pm);
}

double geometric_pmf(double m, std::int64_t k) { return std::exp(log_geometric_pmf(m, k)); }

double exponential_density(double m, double z) {
  if (!(m > 0.0)) throw std::domain_error("exponential_density: mean must be > 0");
  return z < 0.0 ? 0.0 : std::exp(-z / m) / m;
}

double mgf_geometric(double m, double lambda) {
  if (!(m > 0.0)) throw std::domain_error("mgf_geometric: mean must be > 0");
  if (!(lambda >= 0.0) || !(lambda < (1.0 + m) / m))
    throw std::domain_error("mgf_geometric: lambda outside [0, (1+m)/m)");
  return 1.0 / (1.0 + (1.0 - lambda) * m);
}

double mgf_exponential(double m, double t) {
  if (!(m > 0.0)) throw std::domain_error("mgf_exponential: mean must be > 0");
  if (!(t * m < 1.0)) throw std::domain_error("mgf_exponential: requires t < 1/m");
  return 1.0 / (1.0 - t * m);
}

std::int64_t sample_geometric(double m, Rng& rng) {
  const double log_ratio = std::log(m) - std::log1p(m);
  return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / log_ratio));
}

OrderedProfile sample_ordered_profile(const MixtureSpec& spec, Rng& rng) {
  OrderedProfile profile;
  profile.m.resize(static_cast<std::size_t>(spec.n()));
  const double lo = spec.lo(), hi = spec.hi();
  for (auto& v : profile.m) v = lo == hi ? lo : std::min(rng.uniform(lo, hi), hi);
  std::sort(profile.m.begin(), profile.m.end());
  return profile;
}

DiscreteConfig sample_exact_discrete(const MixtureSpec& spec, Rng& rng) {
  if (spec.model != Model::Discrete) throw std::invalid_argument("sample_exact_discrete: discrete spec required");
  const auto profile = sample_ordered_profile(spec, rng);
  DiscreteConfig config;
  config.eta.reserve(profile.size());
  for (double m : profile.m) config.eta.push_back(sample_geometric(m, rng));
  return config;
}

ContinuousConfig sample_exact_continuous(const MixtureSpec& spec, Rng& rng) {
  if (spec.model != Model::Continuous) throw std::invalid_argument("sample_exact_continuous: continuous spec required");
  const auto profile = sample_ordered_profile(spec, rng);
  ContinuousConfig config;
  config.z.reserve(profile.size());
  for (double m : profile.m) config.z.push_back(m * rng.exponential());
  return config;
}

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Shared driver: `log_component(x, m)` is log of the x-th factor (0-based).
template <class LogComponent>
DensityValue mixture_density(const MixtureSpec& spec, const DensityOptions& options,
                             LogComponent&& log_component) {
  const int n = spec.n();
  const double lo = spec.lo(), hi = spec.hi();
  DensityValue out;

  if (spec.degenerate()) {
    double log_sum = 0.0;
    for (int x = 0; x < n; ++x) log_sum += log_component(x, lo);
    out.value = std::exp(log_sum);
    out.method = Method::Exact;
    return out;
  }

  auto product = [&](std::span<const double> m) {
    double log_sum = 0.0;
    for (int x = 0; x < n; ++x) log_sum += log_component(x, m[static_cast<std::size_t>(x)]);
    return std::exp(log_sum);
  };

  if (n <= options.max_quadrature_sites && !options.force_monte_carlo) {
    const double norm = std::exp(log_factorial(n) - n * std::log(hi - lo));
    QuadratureOptions q;
    q.abs_tol = options.tol / norm;
    q.rel_tol = options.rel_tol;
    auto r = integrate_ordered_simplex(product, n, lo, hi, q);
    out.value = norm * r.value;
    out.error = norm * r.error;
    out.converged = r.converged;
    out.method = Method::Quadrature;
    return out;
  }

  Rng rng(options.seed, 0);
  MixtureSpec sampling = spec;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < options.mc_samples; ++i) {
    const auto profile = sample_ordered_profile(sampling, rng);
    const double v = product(profile.m);
    sum += v;
    sum_sq += v * v;
  }
  const double count = static_cast<double>(options.mc_samples);
  out.value = sum / count;
  out.error = std::sqrt(std::max(0.0, sum_sq / count - out.value * out.value) / count);
  out.method = Method::MonteCarlo;
  out.samples = options.mc_samples;
  return out;
}

void check_size(const MixtureSpec& spec, std::size_t size) {
  if (size != static_cast<std::size_t>(spec.n()))
    throw std::invalid_argument("configuration length does not match the number of sites");
}

}  // namespace

DensityValue mixture_density_discrete(const MixtureSpec& spec, const DiscreteConfig& eta,
                                      const DensityOptions& options) {
  check_size(spec, eta.size());
  for (auto k : eta.eta)
    if (k < 0) return {};
  return mixture_density(spec, options, [&](int x, double m) {
    return log_geometric_pmf(m, eta.eta[static_cast<std::size_t>(x)]);
  });
}

DensityValue mixture_density_continuous(const MixtureSpec& spec, const ContinuousConfig& z,
                                        const DensityOptions& options) {
  check_size(spec, z.size());
  for (double v : z.z)
    if (v < 0.0) return {};
  return mixture_density(spec, options, [&](int x, double m) {
    return -z.z[static_cast<std::size_t>(x)] / m - std::log(m);
  });
}

double order_statistic_density(int n, int x, double lo, double hi, double m) {
  if (x < 1 || x > n) throw std::out_of_range("order_statistic_density: site index out of range");
  if (m < lo || m > hi) return 0.0;
  const double width = hi - lo;
  const double u = (m - lo) / width;
  const double log_coeff = log_factorial(n) - log_factorial(x - 1) - log_factorial(n - x);
  double log_value = log_coeff - std::log(width);
  if (x > 1) {
    if (u == 0.0) return 0.0;
    log_value += (x - 1) * std::log(u);
  }
  if (n > x) {
    if (u == 1.0) return 0.0;
    log_value += (n - x) * std::log1p(-u);
  }
  return std::exp(log_value);
}

namespace {

template <class Kernel>
double mix_over_order_statistic(const MixtureSpec& spec, int x, double tol, Kernel&& kernel) {
  if (x < 1 || x > spec.n()) throw std::out_of_range("site index out of range");
  const double lo = spec.lo(), hi = spec.hi();
  if (spec.degenerate()) return kernel(lo);
  QuadratureOptions q;
  q.abs_tol = tol;
  q.rel_tol = 1e-12;
  auto r = quadrature_1d(
      [&](double m) { return kernel(m) * order_statistic_density(spec.n(), x, lo, hi, m); }, lo, hi, q);
  if (!r.converged) throw QuadratureError("order-statistic mixture integral did not converge");
  return r.value;
}

}  // namespace

double marginal_pmf_discrete(const MixtureSpec& spec, int x, std::int64_t k, double tol) {
  if (k < 0) return 0.0;
  return mix_over_order_statistic(spec, x, tol, [k](double m) { return geometric_pmf(m, k); });
}

double marginal_cdf_continuous(const MixtureSpec& spec, int x, double t, double tol) {
  if (t <= 0.0) return 0.0;
  return mix_over_order_statistic(spec, x, tol, [t](double m) { return -std::expm1(-t / m); });
}

MomentProfile profile_moments(int n, double lo, double hi) {
  MomentProfile out;
  const auto size = static_cast<std::size_t>(n);
  out.means.resize(size);
  out.covariance.assign(size, std::vector<double>(size, 0.0));
  const double width = hi - lo;
  const double np1 = n + 1.0;
  for (int x = 1; x <= n; ++x) {
    out.means[static_cast<std::size_t>(x - 1)] = lo + width * x / np1;
    for (int y = x; y <= n; ++y) {
      const double c = width * width * x * (np1 - y) / (np1 * np1 * (n + 2.0));
      out.covariance[static_cast<std::size_t>(x - 1)][static_cast<std::size_t>(y - 1)] = c;
      out.covariance[static_cast<std::size_t>(y - 1)][static_cast<std::size_t>(x - 1)] = c;
    }
  }
  return out;
}

MomentProfile moment_profile(const MixtureSpec& spec) {
  auto out = profile_moments(spec.n(), spec.lo(), spec.hi());
  for (std::size_t x = 0; x < out.means.size(); ++x) {
    const double mean = out.means[x];
    const double second = out.covariance[x][x] + mean * mean;
    out.covariance[x][x] += spec.model == Model::Discrete ? mean + second : second;
  }
  return out;
}

double mean_matched_product_pmf(const MixtureSpec& spec, const DiscreteConfig& eta) {
  check_size(spec, eta.size());
  const auto means = profile_moments(spec.n(), spec.lo(), spec.hi()).means;
  double log_sum = 0.0;
  for (std::size_t x = 0; x < means.size(); ++x) {
    if (eta.eta[x] < 0) return 0.0;
    log_sum += log_geometric_pmf(means[x], eta.eta[x]);
  }
  return std::exp(log_sum);
}

double mean_matched_product_density(const MixtureSpec& spec, const ContinuousConfig& z) {
  check_size(spec, z.size());
  const auto means = profile_moments(spec.n(), spec.lo(), spec.hi()).means;
  double value = 1.0;
  for (std::size_t x = 0; x < means.size(); ++x) value *= exponential_density(means[x], z.z[x]);
  return value;
}

}  // namespace hmix::exact
