#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmix/core/config.hpp"
#include "hmix/core/params.hpp"
#include "hmix/core/rng.hpp"

namespace hmix::exact {

// ---------------------------------------------------------------------------
// Single-site laws and their generating functions
// ---------------------------------------------------------------------------

/// Geometric law of mean m: (1/(1+m)) (m/(1+m))^k, evaluated in log space.
double geometric_pmf(double m, std::int64_t k);
double log_geometric_pmf(double m, std::int64_t k);

/// Exponential density of mean m at z >= 0 (zero for z < 0).
double exponential_density(double m, double z);

/// sum_k G_m(k) lambda^k = 1 / (1 + (1 - lambda) m) for 0 <= lambda < (1+m)/m.
double mgf_geometric(double m, double lambda);

/// int E_m(z) e^{tz} dz = 1 / (1 - t m) for t < 1/m.
double mgf_exponential(double m, double t);

std::int64_t sample_geometric(double m, Rng& rng);

// ---------------------------------------------------------------------------
// Sampling the invariant measures
// ---------------------------------------------------------------------------

/// Sorted N uniforms on [lo, hi]: a uniform point of the ordered simplex.
OrderedProfile sample_ordered_profile(const MixtureSpec& spec, Rng& rng);

/// Profile, then independent geometrics with means m_x.
DiscreteConfig sample_exact_discrete(const MixtureSpec& spec, Rng& rng);

/// Profile, then independent exponentials with means m_x.
ContinuousConfig sample_exact_continuous(const MixtureSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Evaluating the invariant measures
// ---------------------------------------------------------------------------

enum class Method { Exact, Quadrature, MonteCarlo };
const char* to_string(Method method) noexcept;

struct DensityOptions {
  double tol = 1e-13;       ///< absolute error target on the returned value
  double rel_tol = 1e-11;   ///< relative error target (either one suffices)
  int max_quadrature_sites = 4;
  bool force_monte_carlo = false;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 20240601;
};

struct DensityValue {
  double value = 0.0;
  double error = 0.0;  ///< quadrature estimate, or one Monte Carlo standard error
  Method method = Method::Exact;
  bool converged = true;
  std::uint64_t samples = 0;
};

/// mu(eta) = (N! / (rho_B - rho_A)^N) int_{O_N} prod_x G_{m_x}(eta_x) dm.
/// Nested adaptive quadrature up to `max_quadrature_sites` sites, Monte Carlo
/// over sorted uniforms beyond. A degenerate interval returns the product pmf.
DensityValue mixture_density_discrete(const MixtureSpec& spec, const DiscreteConfig& eta,
                                      const DensityOptions& options = {});

/// Same construction with exponential densities in place of geometrics.
DensityValue mixture_density_continuous(const MixtureSpec& spec, const ContinuousConfig& z,
                                        const DensityOptions& options = {});

/// Density on [lo, hi] of the x-th (1-based) of N sorted uniforms.
double order_statistic_density(int n, int x, double lo, double hi, double m);

/// P(eta_x = k) under the mixture: int G_m(k) f_x(m) dm with f_x the
/// order-statistic density. Throws QuadratureError on non-convergence.
double marginal_pmf_discrete(const MixtureSpec& spec, int x, std::int64_t k, double tol = 1e-13);

/// P(z_x <= t) under the continuous mixture.
double marginal_cdf_continuous(const MixtureSpec& spec, int x, double t, double tol = 1e-13);

struct MomentProfile {
  std::vector<double> means;
  std::vector<std::vector<double>> covariance;
};

/// Exact site means and covariances of the configuration under the mixture.
/// Off-diagonal covariances equal those of the profile (conditional
/// independence); diagonal terms add the conditional variance m + m^2
/// (geometric) or m^2 (exponential).
MomentProfile moment_profile(const MixtureSpec& spec);

/// Mean and covariance of the profile itself (order statistics of uniforms).
MomentProfile profile_moments(int n, double lo, double hi);

/// Product law with the mixture's site means, a deliberately wrong candidate
/// used to confirm that the stationarity checks have power.
double mean_matched_product_pmf(const MixtureSpec& spec, const DiscreteConfig& eta);
double mean_matched_product_density(const MixtureSpec& spec, const ContinuousConfig& z);

}  // namespace hmix::exact
