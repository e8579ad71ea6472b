#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hmix/core/numerics.hpp"
#include "hmix/exact/mixture.hpp"
#include "hmix/verify/checks.hpp"

namespace hmix::verify {

BalanceTerms balance_discrete(const ChainParams& params, const DiscreteMeasure& mu, const DiscreteConfig& eta,
                              int k_sum) {
  const auto n = static_cast<std::size_t>(params.n());
  if (eta.size() != n) throw std::invalid_argument("balance_discrete: configuration has the wrong length");
  BalanceTerms out;

  double exit_rate = params.injection_rate_a() + params.injection_rate_b();
  for (auto v : eta.eta) exit_rate += 2.0 * harmonic_number(static_cast<std::uint64_t>(v));
  out.outflow = mu(eta) * exit_rate;

  DiscreteConfig shifted = eta;
  auto at = [&](std::size_t x, std::int64_t delta) {
    shifted.eta[x] = eta.eta[x] + delta;
    const double v = mu(shifted);
    shifted.eta[x] = eta.eta[x];
    return v;
  };

  double inflow = 0.0;
  const std::size_t last = n - 1;
  // injections into sites 1 and N from the states with k fewer particles
  double pa = 1.0, pb = 1.0;
  for (std::int64_t k = 1; k <= eta.eta[0]; ++k) {
    pa *= params.beta_a();
    inflow += at(0, -k) * pa / static_cast<double>(k);
  }
  for (std::int64_t k = 1; k <= eta.eta[last]; ++k) {
    pb *= params.beta_b();
    inflow += at(last, -k) * pb / static_cast<double>(k);
  }
  // extractions from sites 1 and N out of states with k more particles
  for (int k = 1; k <= k_sum; ++k) inflow += (at(0, k) + at(last, k)) / k;
  // bulk moves of k particles landing on eta
  for (std::size_t x = 0; x + 1 < n; ++x) {
    // from x to x+1: source has eta_x + k and eta_{x+1} - k
    for (std::int64_t k = 1; k <= eta.eta[x + 1]; ++k) {
      shifted.eta[x] = eta.eta[x] + k;
      shifted.eta[x + 1] = eta.eta[x + 1] - k;
      inflow += mu(shifted) / static_cast<double>(k);
    }
    // from x+1 to x
    for (std::int64_t k = 1; k <= eta.eta[x]; ++k) {
      shifted.eta[x + 1] = eta.eta[x + 1] + k;
      shifted.eta[x] = eta.eta[x] - k;
      inflow += mu(shifted) / static_cast<double>(k);
    }
    shifted.eta[x] = eta.eta[x];
    shifted.eta[x + 1] = eta.eta[x + 1];
  }
  out.inflow = inflow;
  return out;
}

int extraction_truncation(double beta_b, double budget) {
  for (int k = 0; k < 100000; ++k) {
    const double bound = std::exp((k + 1) * std::log(beta_b)) / ((k + 1) * (1.0 - beta_b));
    if (bound < budget) return k;
  }
  return 100000;
}

VerificationReport check_stationarity_direct_discrete(const ChainParams& params, const StationarityOptions& options) {
  const int n = params.n();
  if (n > 2) throw std::invalid_argument("check_stationarity_direct_discrete: N <= 2 only");
  if (options.k < 1) throw std::invalid_argument("check_stationarity_direct_discrete: K must be >= 1");
  const MixtureSpec spec{params, Model::Discrete};
  const int box = options.k;
  const double budget = options.tol / 10.0;

  VerificationReport r;
  r.check = "stationarity_direct_discrete";
  r.params = {{"n", n},           {"beta_a", params.beta_a()}, {"beta_b", params.beta_b()},
              {"k", box},         {"tol", options.tol},        {"impostor", options.impostor}};

  int k_sum = extraction_truncation(params.beta_b(), budget);
  if (k_sum > box) {
    r.inconclusive = true;
    k_sum = box;
  }
  const double tail_bound = std::pow(params.beta_b(), k_sum + 1) / ((k_sum + 1) * (1.0 - params.beta_b()));

  // memo over {0..2K}^N; entries outside the box plus the k-sum range stay unused
  const std::size_t side = 2 * static_cast<std::size_t>(box) + 1;
  std::vector<double> table(n == 1 ? side : side * side, std::numeric_limits<double>::quiet_NaN());
  double max_mu_error = 0.0;
  exact::DensityOptions density;
  DiscreteMeasure mu = [&](const DiscreteConfig& eta) {
    for (auto v : eta.eta)
      if (v < 0) return 0.0;
    const std::size_t index =
        n == 1 ? static_cast<std::size_t>(eta.eta[0])
               : static_cast<std::size_t>(eta.eta[0]) * side + static_cast<std::size_t>(eta.eta[1]);
    double& slot = table.at(index);
    if (std::isnan(slot)) {
      if (options.impostor) {
        slot = exact::mean_matched_product_pmf(spec, eta);
      } else {
        const auto d = exact::mixture_density_discrete(spec, eta, density);
        slot = d.value;
        max_mu_error = std::max(max_mu_error, d.error);
      }
    }
    return slot;
  };

  double worst = 0.0, box_mass = 0.0;
  std::vector<std::int64_t> worst_eta;
  DiscreteConfig eta;
  eta.eta.assign(static_cast<std::size_t>(n), 0);
  auto visit = [&] {
    const auto terms = balance_discrete(params, mu, eta, k_sum);
    const double residual = std::abs(terms.outflow - terms.inflow);
    box_mass += mu(eta);
    if (residual > worst) {
      worst = residual;
      worst_eta = eta.eta;
    }
  };
  if (n == 1) {
    for (int a = 0; a <= box; ++a) {
      eta.eta[0] = a;
      visit();
    }
  } else {
    for (int a = 0; a <= box; ++a)
      for (int b = 0; b <= box; ++b) {
        eta.eta = {a, b};
        visit();
      }
  }

  r.add("max_balance_residual", worst, options.tol);
  r.method = options.impostor ? "mean-matched product law" : "mixture density by nested quadrature";
  r.notes = {{"k_sum", k_sum},
             {"tail_bound_relative", tail_bound},
             {"truncation_budget", budget},
             {"box_mass", box_mass},
             {"box_mass_deficit", 1.0 - box_mass},
             {"worst_eta", worst_eta},
             {"max_density_error", max_mu_error}};
  return r;
}

VerificationReport check_equilibrium_limit(const ChainParams& params, Model model, double tol) {
  const MixtureSpec spec{params, model};
  const double lo = spec.lo(), hi = spec.hi();
  if (hi - lo > 1e-4 * lo) throw std::invalid_argument("check_equilibrium_limit: boundary values must (nearly) coincide");
  const int n = params.n();
  VerificationReport r;
  r.check = model == Model::Discrete ? "equilibrium_limit_discrete" : "equilibrium_limit_continuous";
  r.params = {{"n", n}, {"lo", lo}, {"hi", hi}, {"tol", tol}};
  r.method = spec.degenerate() ? "degenerate mixture" : "nested quadrature";

  // grid: all points of {g_0..g_4}^N for N <= 3, a diagonal sweep beyond
  const std::vector<double> discrete_grid = {0, 1, 2, 3, 7};
  const std::vector<double> continuous_grid = {0.05, 0.5, 1.0, 2.0, 6.0};
  const auto& grid = model == Model::Discrete ? discrete_grid : continuous_grid;
  std::vector<std::vector<double>> points;
  if (n <= 3) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      std::vector<double> p;
      for (auto i : idx) p.push_back(grid[i]);
      points.push_back(p);
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == grid.size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
  } else {
    for (std::size_t s = 0; s < grid.size(); ++s) {
      std::vector<double> p;
      for (int x = 0; x < n; ++x) p.push_back(grid[(s + static_cast<std::size_t>(x)) % grid.size()]);
      points.push_back(p);
    }
  }

  double worst = 0.0;
  exact::DensityOptions density;
  density.tol = 0.0;
  density.rel_tol = std::min(1e-11, tol * 1e-2);
  for (const auto& p : points) {
    double mixture = 0.0, product = 1.0;
    if (model == Model::Discrete) {
      DiscreteConfig eta;
      for (double v : p) {
        eta.eta.push_back(static_cast<std::int64_t>(v));
        product *= exact::geometric_pmf(lo, static_cast<std::int64_t>(v));
      }
      mixture = exact::mixture_density_discrete(spec, eta, density).value;
    } else {
      ContinuousConfig z{p};
      for (double v : p) product *= exact::exponential_density(lo, v);
      mixture = exact::mixture_density_continuous(spec, z, density).value;
    }
    worst = std::max(worst, std::abs(mixture - product) / product);
  }
  r.add("max_relative_difference", worst, tol);
  r.notes = {{"grid_points", points.size()}};
  return r;
}

}  // namespace hmix::verify
