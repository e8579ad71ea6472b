#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmix/core/quadrature.hpp"
#include "hmix/core/rng.hpp"
#include "hmix/verify/checks.hpp"

namespace hmix::verify {

namespace {

// log F_m(s) and F_m(s) for one model, where s is lambda or t.
struct Mgf {
  bool discrete;
  double log_f(double m, double s) const { return discrete ? -std::log1p((1.0 - s) * m) : -std::log1p(-s * m); }
  double f(double m, double s) const { return discrete ? 1.0 / (1.0 + (1.0 - s) * m) : 1.0 / (1.0 - s * m); }
};

// The x-th Laplacian term of the integrand at profile m, boundaries lo and hi.
double term(const Mgf& mgf, std::span<const double> m, const std::vector<double>& s, std::size_t x, double lo,
            double hi) {
  const std::size_t n = m.size();
  const double left = x == 0 ? lo : m[x - 1];
  const double right = x + 1 == n ? hi : m[x + 1];
  double product = 1.0;
  for (std::size_t y = 0; y < n; ++y) product *= mgf.f(m[y], s[y]);
  return (mgf.log_f(left, s[x]) - 2.0 * mgf.log_f(m[x], s[x]) + mgf.log_f(right, s[x])) * product;
}

VerificationReport telescoping(const Mgf& mgf, const char* name, const char* variable, double lo, double hi,
                               const std::vector<double>& s, const TelescopingOptions& options) {
  const int n = static_cast<int>(s.size());
  VerificationReport r;
  r.check = name;
  r.params = {{"n", n}, {"lo", lo}, {"hi", hi}, {variable, s}, {"impostor", options.impostor}};
  const double width = hi - lo;
  double log_norm = std::lgamma(n + 1.0) - n * std::log(width);  // 1/|O_N|

  std::vector<double> values(static_cast<std::size_t>(n), 0.0), tolerances(static_cast<std::size_t>(n), options.tol);
  double total = 0.0, total_tol = options.tol;

  if (options.impostor) {
    std::vector<double> mean(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) mean[x] = lo + width * (x + 1) / (n + 1.0);
    for (int x = 0; x < n; ++x) values[x] = term(mgf, mean, s, static_cast<std::size_t>(x), lo, hi);
    for (double v : values) total += v;
    r.method = "point mass at the mean profile";
  } else if (options.method == IntegrationMethod::Quadrature ||
             (options.method == IntegrationMethod::Auto && n <= 3)) {
    if (!(width > 0.0)) throw std::invalid_argument("telescoping check needs lo < hi");
    const double norm = std::exp(log_norm);
    QuadratureOptions q{.abs_tol = options.tol * 0.1 / norm, .rel_tol = 0.0, .max_intervals = 4000};
    std::int64_t evaluations = 0;
    bool converged = true;
    for (int x = 0; x < n; ++x) {
      auto f = [&](std::span<const double> m) { return term(mgf, m, s, static_cast<std::size_t>(x), lo, hi); };
      const auto res = integrate_ordered_simplex(f, n, lo, hi, q);
      values[x] = res.value * norm;
      evaluations += static_cast<std::int64_t>(res.evaluations);
      converged = converged && res.converged;
    }
    for (double v : values) total += v;
    if (!converged) r.inconclusive = true;
    r.method = "nested adaptive Gauss-Kronrod over the ordered simplex";
    r.notes = {{"evaluations", evaluations}, {"converged", converged}};
  } else {
    // the average over O_N is the expectation under sorted uniforms
    Rng rng(options.seed);
    std::vector<double> sum(static_cast<std::size_t>(n), 0.0), sum2(static_cast<std::size_t>(n), 0.0);
    double tsum = 0.0, tsum2 = 0.0;
    std::vector<double> m(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < options.mc_samples; ++i) {
      for (auto& v : m) v = lo + width * rng.uniform();
      std::sort(m.begin(), m.end());
      double row = 0.0;
      for (int x = 0; x < n; ++x) {
        const double v = term(mgf, m, s, static_cast<std::size_t>(x), lo, hi);
        sum[x] += v;
        sum2[x] += v * v;
        row += v;
      }
      tsum += row;
      tsum2 += row * row;
    }
    const double count = static_cast<double>(options.mc_samples);
    auto se = [count](double s1, double s2) {
      const double mean = s1 / count;
      return std::sqrt(std::max(0.0, s2 / count - mean * mean) / (count - 1.0));
    };
    for (int x = 0; x < n; ++x) {
      values[x] = sum[x] / count;
      tolerances[x] = options.mc_sigmas * se(sum[x], sum2[x]);
    }
    total = tsum / count;
    total_tol = options.mc_sigmas * se(tsum, tsum2);
    r.method = "Monte Carlo over sorted uniforms";
    r.notes = {{"samples", options.mc_samples}, {"seed", options.seed}, {"sigmas", options.mc_sigmas}};
  }

  for (int x = 0; x < n; ++x) r.add("term_x" + std::to_string(x + 1), std::abs(values[x]), tolerances[x]);
  r.add("sum", std::abs(total), total_tol);
  r.notes["terms"] = values;
  r.notes["sum"] = total;
  return r;
}

}  // namespace

VerificationReport check_telescoping_discrete(const ChainParams& params, const std::vector<double>& lambda,
                                              const TelescopingOptions& options) {
  if (static_cast<int>(lambda.size()) != params.n())
    throw std::invalid_argument("check_telescoping_discrete: lambda vector has the wrong length");
  const double limit = (1.0 + params.rho_b()) / params.rho_b();
  for (double l : lambda)
    if (!(l >= 0.0 && l < limit)) throw std::invalid_argument("check_telescoping_discrete: lambda outside the MGF domain");
  return telescoping({true}, "telescoping_discrete", "lambda", params.rho_a(), params.rho_b(), lambda, options);
}

VerificationReport check_telescoping_continuous(const ChainParams& params, const std::vector<double>& t,
                                                const TelescopingOptions& options) {
  if (static_cast<int>(t.size()) != params.n())
    throw std::invalid_argument("check_telescoping_continuous: t vector has the wrong length");
  for (double v : t)
    if (!(v < 1.0 / params.t_b())) throw std::invalid_argument("check_telescoping_continuous: need t < 1/T_B");
  return telescoping({false}, "telescoping_continuous", "t", params.t_a(), params.t_b(), t, options);
}

std::vector<VerificationReport> telescoping_suite(const ChainParams& discrete, const ChainParams& continuous,
                                                  const TelescopingOptions& options, int random_vectors) {
  std::vector<VerificationReport> out;
  auto next = [&options, index = std::uint64_t{0}]() mutable {
    TelescopingOptions o = options;
    o.seed = options.seed + index++;
    return o;
  };
  const auto n = static_cast<std::size_t>(discrete.n());
  Rng grid_rng(options.seed, 0x5eed);

  for (double l : default_lambda_grid())
    out.push_back(check_telescoping_discrete(discrete, std::vector<double>(n, l), next()));
  if (n > 1)
    for (int i = 0; i < random_vectors; ++i) {
      std::vector<double> l(n);
      for (auto& v : l) v = grid_rng.uniform(0.0, 0.99);
      out.push_back(check_telescoping_discrete(discrete, l, next()));
    }

  const auto nc = static_cast<std::size_t>(continuous.n());
  const double t_max = 1.0 / continuous.t_b();
  for (double t : default_t_grid(continuous.t_b()))
    out.push_back(check_telescoping_continuous(continuous, std::vector<double>(nc, t), next()));
  if (nc > 1)
    for (int i = 0; i < random_vectors; ++i) {
      std::vector<double> t(nc);
      for (auto& v : t) v = grid_rng.uniform(-1.0, 0.6 * t_max);
      out.push_back(check_telescoping_continuous(continuous, t, next()));
    }
  if (nc == 3 && 0.4 < t_max) out.push_back(check_telescoping_continuous(continuous, {-0.5, 0.1, 0.4}, next()));
  return out;
}

}  // namespace hmix::verify
