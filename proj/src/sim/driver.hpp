#pragma once

#include <chrono>

#include "hmix/core/rng.hpp"
#include "hmix/sim/common.hpp"

namespace hmix::sim::detail {

// Event loop shared by both simulators. The state held during each holding
// interval is recorded before the channel fires.
template <class Simulator>
SimulationResult run(Simulator& sim, OccupationAccumulator& acc, const RunOptions& options, Rng& rng) {
  const auto started = std::chrono::steady_clock::now();
  SimulationResult result;
  std::uint64_t since_refresh = 0;
  while (sim.time() < options.t_max) {
    const double dt = sim.holding_time(rng);
    acc.add(sim.values(), sim.bins(), sim.time(), dt);
    sim.advance(dt);
    sim.fire(rng);
    ++result.total_events;
    if (acc.observing(sim.time()) && sim.time() < options.t_max) {
      acc.count_event();
      record_flux(acc.flux(), sim.last_event());
    }
    if (options.observer) options.observer(sim.last_event());
    if (options.refresh_interval > 0 && ++since_refresh >= options.refresh_interval) {
      sim.refresh_rates();
      since_refresh = 0;
    }
  }
  result.stats = acc.finalize();
  result.stationarity_z = acc.stationarity_z();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace hmix::sim::detail
