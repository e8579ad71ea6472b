#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hmix/sim/occupation.hpp"
#include "hmix/sim/rate_table.hpp"

namespace hmix::sim {

enum class EventKind { Bulk, Extraction, Injection };

/// One fired channel. Sites are 0-based; -1 denotes reservoir A and N
/// reservoir B.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Injection;
  int from = -1;
  int to = 0;
  double amount = 0.0;
};

using EventObserver = std::function<void(const Event&)>;

struct RunOptions {
  double t_max = 1000.0;
  double burn_in = 100.0;
  std::size_t batches = 1000;
  std::uint64_t refresh_interval = 1u << 20;  ///< events between full rate recomputations
  RateTable::Strategy selection = RateTable::Strategy::Auto;
  EventObserver observer;  ///< called after every event, burn-in included
};

struct SimulationResult {
  OccupationStats stats;
  std::uint64_t total_events = 0;
  double wall_seconds = 0.0;
  std::vector<double> stationarity_z;  ///< first- vs second-half batch means per site
};

/// Applies the event's transport to the flux counters.
inline void record_flux(FluxCounters& flux, const Event& e) {
  if (e.kind == EventKind::Injection) {
    (e.from < 0 ? flux.injected_a : flux.injected_b) += e.amount;
    return;
  }
  if (e.kind == EventKind::Extraction) {
    (e.to < 0 ? flux.extracted_a : flux.extracted_b) += e.amount;
    return;
  }
  if (e.to == e.from + 1) flux.bond_current[static_cast<std::size_t>(e.from)] += e.amount;
  else flux.bond_current[static_cast<std::size_t>(e.to)] -= e.amount;
}

}  // namespace hmix::sim
