#include "hmix/core/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmix {

HarmonicTable::HarmonicTable(std::uint64_t bound) : bound_(bound), values_(bound + 1) {
  double sum = 0.0;
  double carry = 0.0;
  values_[0] = 0.0;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    const double y = 1.0 / static_cast<double>(k) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    values_[k] = sum;
  }
}

double HarmonicTable::asymptotic(std::uint64_t n) noexcept {
  if (n == 0) return 0.0;
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

const HarmonicTable& harmonic_table() {
  static const HarmonicTable table;
  return table;
}

namespace {

// Power series, accurate for 0 < x <= 1.
double e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double contribution = term / k;
    sum += contribution;
    if (std::abs(contribution) < 1e-17 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// Modified Lentz evaluation of the continued fraction for x > 1.
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: argument must be > 0");
  if (std::isinf(x)) return 0.0;
  return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

}  // namespace hmix
