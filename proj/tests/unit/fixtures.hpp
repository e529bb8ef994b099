#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rz/fpfs.hpp"
#include "rz/traffic_model.hpp"

namespace rz::test {

struct CrossingSpec {
  std::string volume;
  double entry_min;
};

struct FlightSpec {
  std::string id;
  std::vector<CrossingSpec> crossings;
};

/// Scenario on the default grid with a flat capacity per volume.
inline Scenario make_scenario(const std::vector<std::string>& volumes,
                              const std::vector<FlightSpec>& flights, int capacity = 100) {
  std::vector<Flight> out;
  for (const FlightSpec& fs : flights) {
    Flight f;
    f.id = fs.id;
    for (const CrossingSpec& c : fs.crossings) {
      const auto it = std::find(volumes.begin(), volumes.end(), c.volume);
      Crossing x;
      x.tv = static_cast<VolumeIdx>(it - volumes.begin());
      x.entry = to_ticks(c.entry_min);
      f.crossings.push_back(x);
    }
    out.push_back(std::move(f));
  }
  TimeGrid grid;
  return Scenario(grid, volumes, std::move(out),
                  CapacityProfile(volumes.size(), grid.num_bins, capacity));
}

/// Flight X is caught by a regulation at A (stage delay 10) and then at B
/// (stage delay 7 whether or not the first stage is applied).
struct CascadeFixture {
  Scenario scenario;
  std::vector<Regulation> regulations;
  FlightIdx x = 0;
};

inline CascadeFixture mpr_fixture() {
  CascadeFixture fx;
  fx.scenario = make_scenario({"A", "B"}, {{"X", {{"A", 575.0}, {"B", 598.0}}}});
  fx.x = fx.scenario.flight_index("X");
  Regulation at_a;
  at_a.cv = 0;
  at_a.t_start = at_a.t_end = 38;  // anchor 570, slots every 15 min
  at_a.rate_per_hour = 4;
  at_a.members = {fx.x};
  Regulation at_b;
  at_b.cv = 1;
  at_b.t_start = at_b.t_end = 39;  // anchor 585, slots every 10 min
  at_b.rate_per_hour = 6;
  at_b.members = {fx.x};
  fx.regulations = {at_a, at_b};
  return fx;
}

/// Straightforward per-flight demand count, independent of build_demand.
inline DemandGrid naive_demand(const Scenario& sc, const DelayVector& delays) {
  const TimeGrid& g = sc.grid();
  DemandGrid out(sc.num_volumes(), g.num_bins);
  for (FlightIdx f = 0; f < sc.num_flights(); ++f) {
    for (const Crossing& c : sc.flight(f).crossings) {
      const Ticks t = c.entry + static_cast<Ticks>(delays[f]) * kTicksPerMinute;
      if (t >= g.day_ticks()) continue;
      out.entries_row(c.tv)[static_cast<int>(t / g.bin_ticks())] += 1;
    }
  }
  for (VolumeIdx v = 0; v < sc.num_volumes(); ++v) {
    for (int t = 0; t < g.num_bins; ++t) {
      int d = 0;
      for (int k = t; k < std::min(t + g.rolling_window_bins, g.num_bins); ++k) {
        d += out.entries(v, k);
      }
      out.demand_row(v)[t] = d;
      out.excess_row(v)[t] = std::max(0, d - sc.capacities().at(v, t));
    }
  }
  return out;
}

inline std::int64_t naive_excess(const Scenario& sc, const DelayVector& delays) {
  const DemandGrid d = naive_demand(sc, delays);
  std::int64_t total = 0;
  for (VolumeIdx v = 0; v < sc.num_volumes(); ++v) {
    for (int t = 0; t < sc.grid().num_bins; ++t) total += d.excess(v, t);
  }
  return total;
}

inline double naive_j(const Scenario& sc, const DelayVector& delays, ObjectiveWeights w = {}) {
  std::int64_t delay = 0;
  for (int x : delays.values()) delay += x;
  return w.w_cap * static_cast<double>(naive_excess(sc, delays)) +
         w.w_delay * static_cast<double>(delay);
}

/// Random small scenario: a few volumes, flights crossing 1..3 of them.
inline Scenario random_scenario(std::mt19937_64& rng, int flights, int volumes, int capacity) {
  std::vector<std::string> names;
  for (int v = 0; v < volumes; ++v) names.push_back("V" + std::to_string(v));
  std::vector<FlightSpec> specs;
  std::uniform_int_distribution<int> nvol(1, std::min(3, volumes));
  std::uniform_int_distribution<int> start(4200, 6000);  // tenths of a minute
  std::uniform_int_distribution<int> hop(30, 250);
  for (int i = 0; i < flights; ++i) {
    FlightSpec fs;
    fs.id = "F" + std::to_string(1000 + i);
    int t = start(rng);
    const int n = nvol(rng);
    std::vector<std::string> order = names;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < n; ++k) {
      fs.crossings.push_back({order[static_cast<std::size_t>(k)], t / 10.0});
      t += hop(rng);
    }
    specs.push_back(std::move(fs));
  }
  return make_scenario(names, specs, capacity);
}

}  // namespace rz::test
