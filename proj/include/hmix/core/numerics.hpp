#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hmix {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Harmonic numbers H(0..bound), accumulated with compensated summation so
/// every cached entry is correctly rounded. Beyond the bound the asymptotic
/// expansion ln n + gamma + 1/(2n) - 1/(12n^2) + 1/(120n^4) is used.
class HarmonicTable {
 public:
  static constexpr std::uint64_t kDefaultBound = 1'000'000;

  explicit HarmonicTable(std::uint64_t bound = kDefaultBound);

  double operator()(std::uint64_t n) const noexcept {
    return n <= bound_ ? values_[n] : asymptotic(n);
  }

  std::uint64_t bound() const noexcept { return bound_; }

  /// Prefix sums H(0), H(1), ..., H(bound).
  std::span<const double> values() const noexcept { return values_; }

  static double asymptotic(std::uint64_t n) noexcept;

 private:
  std::uint64_t bound_;
  std::vector<double> values_;
};

/// Process-wide table with the default bound, built on first use.
const HarmonicTable& harmonic_table();

inline double harmonic_number(std::uint64_t n) { return harmonic_table()(n); }

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
/// Throws std::domain_error for x <= 0.
double exp_integral_e1(double x);

}  // namespace hmix
