#include <cmath>
#include <stdexcept>
#include <vector>

#include "hmix/core/quadrature.hpp"
#include "hmix/verify/checks.hpp"

namespace hmix::verify {

namespace {

constexpr double kFrullaniSeriesEnd = 1e-4;

void require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged) throw QuadratureError(std::string(what) + ": quadrature did not converge");
}

}  // namespace

VerificationReport check_antiderivative_discrete(double m, double lambda, double tol) {
  if (!(m > 0.0)) throw std::invalid_argument("check_antiderivative_discrete: m must be positive");
  if (!(lambda >= 0.0 && lambda < (1.0 + m) / m) || lambda == 1.0)
    throw std::invalid_argument("check_antiderivative_discrete: lambda outside [0,1) U (1,(1+m)/m)");
  VerificationReport r;
  r.check = "antiderivative_discrete";
  r.params = {{"m", m}, {"lambda", lambda}};
  const double c = 1.0 - lambda;
  const auto q = quadrature_1d([c](double mp) { return 1.0 / (1.0 + c * mp); }, 0.0, m,
                               {.abs_tol = tol * 1e-3, .rel_tol = 1e-13});
  require_converged(q, "check_antiderivative_discrete");
  // log F_m(lambda) / (lambda - 1) = log(1 + (1 - lambda) m) / (1 - lambda)
  const double closed = std::log1p(c * m) / c;
  r.add("identity", std::abs(q.value - closed), tol);
  if (std::abs(c) < 1e-4) r.add("limit_m", std::abs(q.value - m), 1e-4);
  r.method = "adaptive Gauss-Kronrod";
  r.notes = {{"quadrature", q.value}, {"closed_form", closed}, {"error_estimate", q.error}};
  return r;
}

VerificationReport check_antiderivative_continuous(double m, double t, double tol) {
  if (!(m > 0.0)) throw std::invalid_argument("check_antiderivative_continuous: m must be positive");
  if (!(t < 1.0 / m) || t == 0.0) throw std::invalid_argument("check_antiderivative_continuous: need t < 1/m, t != 0");
  VerificationReport r;
  r.check = "antiderivative_continuous";
  r.params = {{"m", m}, {"t", t}};
  const auto q = quadrature_1d([t](double mp) { return 1.0 / (1.0 - t * mp); }, 0.0, m,
                               {.abs_tol = tol * 1e-3, .rel_tol = 1e-13});
  require_converged(q, "check_antiderivative_continuous");
  // log F_m(t) / t = -log(1 - t m) / t
  const double closed = -std::log1p(-t * m) / t;
  r.add("identity", std::abs(q.value - closed), tol);
  if (std::abs(t) < 1e-4) r.add("limit_m", std::abs(q.value - m), 1e-4);
  r.method = "adaptive Gauss-Kronrod";
  r.notes = {{"quadrature", q.value}, {"closed_form", closed}, {"error_estimate", q.error}};
  return r;
}

VerificationReport check_frullani(double a, double b, double tol) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("check_frullani: a and b must be positive");
  VerificationReport r;
  r.check = "frullani";
  r.params = {{"a", a}, {"b", b}};
  r.method = "series on [0,1e-4] + log-spaced Gauss-Kronrod + tail bound";

  // sum_{n>=1} ((-a)^n - (-b)^n) x0^n / (n n!)
  double series = 0.0;
  double pa = 1.0, pb = 1.0, factorial = 1.0;
  for (int n = 1; n < 60; ++n) {
    pa *= -a * kFrullaniSeriesEnd;
    pb *= -b * kFrullaniSeriesEnd;
    factorial *= n;
    const double term = (pa - pb) / (n * factorial);
    series += term;
    if (std::abs(term) < 1e-22) break;
  }

  const double upper = 40.0 / std::min(a, b);
  auto integrand = [a, b](double x) { return (std::expm1(-a * x) - std::expm1(-b * x)) / x; };
  double body = 0.0, error = 0.0;
  int pieces = 0;
  for (double lo = kFrullaniSeriesEnd; lo < upper; lo *= 10.0) {
    const double hi = std::min(lo * 10.0, upper);
    const auto q = quadrature_1d(integrand, lo, hi, {.abs_tol = tol * 1e-3, .rel_tol = 0.0});
    require_converged(q, "check_frullani");
    body += q.value;
    error += q.error;
    ++pieces;
  }
  const double tail_bound = (std::exp(-a * upper) / a + std::exp(-b * upper) / b) / upper;
  const double value = series + body;
  const double exact = std::log(b / a);
  r.add("identity", std::abs(value - exact), tol);
  if (tail_bound > tol / 10.0) r.inconclusive = true;
  r.notes = {{"value", value},         {"ln_b_over_a", exact}, {"series_part", series},
             {"quadrature_pieces", pieces}, {"upper_limit", upper}, {"tail_bound", tail_bound},
             {"error_estimate", error}};
  return r;
}

std::vector<double> default_lambda_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

std::vector<double> default_t_grid(double t_b) { return {-1.0, -0.3, 0.1, 0.3, 0.6 / t_b}; }

std::vector<VerificationReport> identities_suite() {
  std::vector<VerificationReport> out;
  for (double m : {0.5, 1.0, 2.0, 3.0, 10.0}) {
    std::vector<double> lambdas = {0.0};
    for (double l : default_lambda_grid()) lambdas.push_back(l);
    for (double l : {1.0 - 1e-6, 1.0 + 1e-6, 1.05, 1.2, 1.5})
      if (l < (1.0 + m) / m) lambdas.push_back(l);
    for (double l : lambdas) out.push_back(check_antiderivative_discrete(m, l));
  }
  for (double m : {0.5, 1.0, 2.0, 3.0}) {
    for (double t : {-1.0, -0.3, -1e-6, 1e-6, 0.1, 0.3, 0.5, 0.6 / m, 0.9 / m})
      if (t < 1.0 / m) out.push_back(check_antiderivative_continuous(m, t));
  }
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.5, 3.0}, {2.0, 2.0}, {3.0, 0.25}})
    out.push_back(check_frullani(a, b));
  return out;
}

}  // namespace hmix::verify
