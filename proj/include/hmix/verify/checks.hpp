#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hmix/core/config.hpp"
#include "hmix/core/params.hpp"
#include "hmix/verify/report.hpp"

namespace hmix::verify {

// ---------------------------------------------------------------------------
// Scalar identities
// ---------------------------------------------------------------------------

/// int_0^m dm' / (1 + (1 - lambda) m')  against  log F_m(lambda) / (lambda - 1).
VerificationReport check_antiderivative_discrete(double m, double lambda, double tol = 1e-10);

/// int_0^m dm' / (1 - t m')  against  log F_m(t) / t.
VerificationReport check_antiderivative_continuous(double m, double t, double tol = 1e-10);

/// int_0^inf (e^{-ax} - e^{-bx}) / x dx  against  ln(b/a). Power series on
/// [0, 1e-4], adaptive quadrature up to 40 / min(a, b), analytic tail bound.
VerificationReport check_frullani(double a, double b, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Generating-function (telescoping) form of stationarity
// ---------------------------------------------------------------------------

enum class IntegrationMethod { Auto, Quadrature, MonteCarlo };

struct TelescopingOptions {
  double tol = 1e-8;
  IntegrationMethod method = IntegrationMethod::Auto;  ///< Auto: quadrature for N <= 3
  std::uint64_t mc_samples = 10'000'000;
  std::uint64_t seed = 1;
  double mc_sigmas = 4.0;
  /// Replace the mixture by a point mass at its mean profile, a wrong
  /// candidate measure that the check must reject.
  bool impostor = false;
};

/// Per site x, the simplex average of
///   [log F_{m_{x-1}}(l_x) - 2 log F_{m_x}(l_x) + log F_{m_{x+1}}(l_x)] prod_y F_{m_y}(l_y)
/// with m_0 = rho_A, m_{N+1} = rho_B. Each term and their sum must vanish.
VerificationReport check_telescoping_discrete(const ChainParams& params, const std::vector<double>& lambda,
                                              const TelescopingOptions& options = {});

/// Continuous analogue with F_m(t) = 1/(1 - t m), m_0 = T_A, m_{N+1} = T_B.
VerificationReport check_telescoping_continuous(const ChainParams& params, const std::vector<double>& t,
                                                const TelescopingOptions& options = {});

// ---------------------------------------------------------------------------
// Direct stationarity of the discrete measure
// ---------------------------------------------------------------------------

using DiscreteMeasure = std::function<double(const DiscreteConfig&)>;

struct BalanceTerms {
  double outflow = 0.0;  ///< mu(eta) times the total exit rate
  double inflow = 0.0;   ///< probability flux into eta, k-sums truncated at k_sum
};

/// Both sides of the discrete stationarity equation at eta. Infinite sums over
/// k stop at k_sum; the injection rates use their closed form -log(1 - beta).
BalanceTerms balance_discrete(const ChainParams& params, const DiscreteMeasure& mu, const DiscreteConfig& eta,
                              int k_sum);

/// Smallest k_sum with beta_B^{k+1} / ((k+1)(1 - beta_B)) below `budget`, the
/// bound on the neglected extraction inflow relative to mu(eta).
int extraction_truncation(double beta_b, double budget);

struct StationarityOptions {
  int k = 200;  ///< box {0..K}^N
  double tol = 1e-8;
  bool impostor = false;  ///< use the mean-matched product law instead of the mixture
};

/// Max over the box of |outflow - inflow| under the mixture measure. N <= 2.
/// Reported inconclusive when the truncation budget tol/10 needs k_sum > K.
VerificationReport check_stationarity_direct_discrete(const ChainParams& params,
                                                      const StationarityOptions& options = {});

// ---------------------------------------------------------------------------
// Equilibrium degeneration
// ---------------------------------------------------------------------------

/// Mixture density against the product law of mean rho_A (or T_A) on a grid.
/// A small positive gap rho_B - rho_A is allowed to probe continuity.
VerificationReport check_equilibrium_limit(const ChainParams& params, Model model, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

std::vector<double> default_lambda_grid();
std::vector<double> default_t_grid(double t_b);

/// Antiderivative relations over (m, lambda) and (m, t) grids, plus Frullani.
std::vector<VerificationReport> identities_suite();

/// Telescoping checks for one N over the default grids: all grid values for
/// N = 1; constant vectors plus `random_vectors` seeded random ones for N >= 2.
std::vector<VerificationReport> telescoping_suite(const ChainParams& discrete, const ChainParams& continuous,
                                                  const TelescopingOptions& options = {},
                                                  int random_vectors = 4);

}  // namespace hmix::verify
