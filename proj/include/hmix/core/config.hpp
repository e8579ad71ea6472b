#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hmix {

/// Particle counts eta_1..eta_N of the discrete model.
struct DiscreteConfig {
  std::vector<std::int64_t> eta;

  std::size_t size() const noexcept { return eta.size(); }
  friend bool operator==(const DiscreteConfig&, const DiscreteConfig&) = default;
};

/// Energies z_1..z_N of the continuous model.
struct ContinuousConfig {
  std::vector<double> z;

  std::size_t size() const noexcept { return z.size(); }
  friend bool operator==(const ContinuousConfig&, const ContinuousConfig&) = default;
};

/// Hidden means lo <= m_1 <= ... <= m_N <= hi of a mixture component.
struct OrderedProfile {
  std::vector<double> m;

  std::size_t size() const noexcept { return m.size(); }
  bool is_ordered(double lo, double hi) const noexcept {
    double previous = lo;
    for (double v : m) {
      if (v < previous) return false;
      previous = v;
    }
    return m.empty() || m.back() <= hi;
  }
};

}  // namespace hmix
