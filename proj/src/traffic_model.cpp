#include "rz/traffic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

namespace rz {

void TimeGrid::validate() const {
  if (bin_width_min <= 0 || num_bins <= 0 || rolling_window_bins <= 0) {
    throw ValidationError("time grid: all sizes must be positive");
  }
  if (bin_width_min * num_bins != 1440) {
    throw ValidationError("time grid: bin_width_min * num_bins must equal 1440");
  }
  if (rolling_window_bins * bin_width_min != 60) {
    throw ValidationError("time grid: rolling window must span 60 minutes");
  }
}

int bin_of(double minutes, const TimeGrid& grid) {
  if (!(minutes >= 0.0) || minutes >= static_cast<double>(grid.day_minutes())) {
    throw DomainError("bin_of: time " + std::to_string(minutes) + " outside [0, 1440)");
  }
  return static_cast<int>(std::floor(minutes / grid.bin_width_min));
}

CapacityProfile::CapacityProfile(std::size_t num_volumes, int num_bins, int fill)
    : num_bins_(num_bins), values_(num_volumes * static_cast<std::size_t>(num_bins), fill) {}

void CapacityProfile::set(VolumeIdx v, int bin, int capacity) {
  if (capacity < 0) throw ValidationError("capacity must be nonnegative");
  values_[index(v, bin)] = capacity;
}

Scenario::Scenario(TimeGrid grid, std::vector<std::string> volumes, std::vector<Flight> flights,
                   CapacityProfile capacities)
    : grid_(grid), volumes_(std::move(volumes)), flights_(std::move(flights)),
      capacities_(std::move(capacities)) {
  grid_.validate();
  for (VolumeIdx v = 0; v < volumes_.size(); ++v) {
    if (!volume_lookup_.emplace(volumes_[v], v).second) {
      throw ValidationError("duplicate volume '" + volumes_[v] + "'");
    }
  }
  if (capacities_.num_volumes() != volumes_.size() ||
      (!volumes_.empty() && capacities_.num_bins() != grid_.num_bins)) {
    throw ValidationError("capacity profile does not cover every (volume, bin)");
  }

  std::sort(flights_.begin(), flights_.end(),
            [](const Flight& a, const Flight& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < flights_.size(); ++i) {
    if (flights_[i].id == flights_[i - 1].id) {
      throw ValidationError("duplicate flight id '" + flights_[i].id + "'");
    }
  }

  by_volume_.assign(volumes_.size(), {});
  footprints_.assign(flights_.size(), {});
  const Ticks day = grid_.day_ticks();
  for (FlightIdx f = 0; f < flights_.size(); ++f) {
    const Flight& flight = flights_[f];
    if (flight.crossings.empty()) {
      throw ValidationError("flight '" + flight.id + "' has no crossings");
    }
    std::vector<VolumeIdx>& foot = footprints_[f];
    for (std::size_t k = 0; k < flight.crossings.size(); ++k) {
      const Crossing& c = flight.crossings[k];
      if (c.tv >= volumes_.size()) {
        throw ValidationError("flight '" + flight.id + "' crosses an unknown volume");
      }
      if (c.entry < 0 || c.entry >= day) {
        throw ValidationError("flight '" + flight.id + "' entry outside [0, 1440)");
      }
      if (c.exit && *c.exit <= c.entry) {
        throw ValidationError("flight '" + flight.id + "' exit not after entry");
      }
      if (k > 0 && c.entry < flight.crossings[k - 1].entry) {
        throw ValidationError("flight '" + flight.id + "' crossings not in entry order");
      }
      foot.push_back(c.tv);
      by_volume_[c.tv].push_back({f, c.entry});
    }
    std::sort(foot.begin(), foot.end());
    if (std::adjacent_find(foot.begin(), foot.end()) != foot.end()) {
      throw ValidationError("flight '" + flight.id + "' enters a volume more than once");
    }
  }
  for (auto& entries : by_volume_) {
    std::sort(entries.begin(), entries.end(), [](const VolumeEntry& a, const VolumeEntry& b) {
      return a.entry != b.entry ? a.entry < b.entry : a.flight < b.flight;
    });
  }
}

std::optional<VolumeIdx> Scenario::find_volume(std::string_view name) const {
  auto it = volume_lookup_.find(std::string(name));
  if (it == volume_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<FlightIdx> Scenario::find_flight(std::string_view id) const {
  auto it = std::lower_bound(flights_.begin(), flights_.end(), id,
                             [](const Flight& f, std::string_view key) { return f.id < key; });
  if (it == flights_.end() || it->id != id) return std::nullopt;
  return static_cast<FlightIdx>(it - flights_.begin());
}

VolumeIdx Scenario::volume_index(std::string_view name) const {
  if (auto v = find_volume(name)) return *v;
  throw DomainError("unknown volume '" + std::string(name) + "'");
}

FlightIdx Scenario::flight_index(std::string_view id) const {
  if (auto f = find_flight(id)) return *f;
  throw DomainError("unknown flight '" + std::string(id) + "'");
}

std::optional<Ticks> Scenario::entry_of(FlightIdx f, VolumeIdx v) const {
  for (const Crossing& c : flights_[f].crossings) {
    if (c.tv == v) return c.entry;
  }
  return std::nullopt;
}

std::size_t Scenario::num_crossings() const {
  std::size_t n = 0;
  for (const auto& entries : by_volume_) n += entries.size();
  return n;
}

std::int64_t DelayVector::total() const {
  return std::accumulate(minutes_.begin(), minutes_.end(), std::int64_t{0});
}

std::size_t DelayVector::count_delayed() const {
  return static_cast<std::size_t>(
      std::count_if(minutes_.begin(), minutes_.end(), [](int d) { return d > 0; }));
}

void DelayVector::validate(std::size_t num_flights, int max_delay_min) const {
  if (minutes_.size() != num_flights) {
    throw ValidationError("delay vector size does not match the flight count");
  }
  for (int d : minutes_) {
    if (d < 0 || d > max_delay_min) {
      throw ValidationError("delay " + std::to_string(d) + " outside [0, max_delay]");
    }
  }
}

DemandGrid::DemandGrid(std::size_t num_volumes, int num_bins)
    : num_volumes_(num_volumes), num_bins_(num_bins),
      entries_(num_volumes * static_cast<std::size_t>(num_bins), 0),
      demand_(entries_.size(), 0), excess_(entries_.size(), 0) {}

std::int64_t DemandGrid::total_excess() const {
  return std::accumulate(excess_.begin(), excess_.end(), std::int64_t{0});
}

void roll_demand_row(std::span<const int> entries, std::span<const int> capacity, int window,
                     std::span<int> demand, std::span<int> excess) {
  const int n = static_cast<int>(entries.size());
  int running = 0;
  // Seed with the first window, then slide; bins beyond the grid count as zero.
  for (int k = 0; k < window && k < n; ++k) running += entries[k];
  for (int t = 0; t < n; ++t) {
    demand[t] = running;
    excess[t] = std::max(running - capacity[t], 0);
    running -= entries[t];
    if (t + window < n) running += entries[t + window];
  }
}

namespace {

// Volumes are independent, so each thread owns whole rows.
constexpr std::size_t kParallelCrossingThreshold = 20000;

}  // namespace

DemandGrid build_demand(const Scenario& scenario, const DelayVector& delays) {
  const TimeGrid& grid = scenario.grid();
  const auto num_volumes = static_cast<std::int64_t>(scenario.num_volumes());
  DemandGrid out(scenario.num_volumes(), grid.num_bins);
  const Ticks day = grid.day_ticks();
  const Ticks bin = grid.bin_ticks();
  const bool parallel = scenario.num_crossings() >= kParallelCrossingThreshold;

#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t vi = 0; vi < num_volumes; ++vi) {
    const auto v = static_cast<VolumeIdx>(vi);
    std::span<int> row = out.entries_row(v);
    for (const VolumeEntry& e : scenario.entries_at(v)) {
      const Ticks shifted = e.entry + static_cast<Ticks>(delays[e.flight]) * kTicksPerMinute;
      if (shifted < day) ++row[static_cast<std::size_t>(shifted / bin)];
    }
    roll_demand_row(row, scenario.capacities().row(v), grid.rolling_window_bins,
                    out.demand_row(v), out.excess_row(v));
  }
  return out;
}

namespace reference {

DemandGrid build_demand(const Scenario& scenario, const DelayVector& delays) {
  const TimeGrid& grid = scenario.grid();
  const std::size_t nv = scenario.num_volumes();
  const auto nb = static_cast<std::size_t>(grid.num_bins);
  std::vector<int> e(nv * nb, 0);
  for (FlightIdx f = 0; f < scenario.num_flights(); ++f) {
    const double shift = static_cast<double>(delays[f]);
    for (const Crossing& c : scenario.flight(f).crossings) {
      const double t = c.entry_min() + shift;
      if (t >= grid.day_minutes()) continue;
      e[c.tv * nb + static_cast<std::size_t>(bin_of(t, grid))] += 1;
    }
  }
  DemandGrid out(nv, grid.num_bins);
  for (VolumeIdx v = 0; v < nv; ++v) {
    for (std::size_t t = 0; t < nb; ++t) {
      int d = 0;
      for (int k = 0; k < grid.rolling_window_bins; ++k) {
        if (t + k < nb) d += e[v * nb + t + k];
      }
      out.entries_row(v)[t] = e[v * nb + t];
      out.demand_row(v)[t] = d;
      out.excess_row(v)[t] = std::max(0, d - scenario.capacities().at(v, static_cast<int>(t)));
    }
  }
  return out;
}

}  // namespace reference

std::vector<Hotspot> detect_hotspots(const DemandGrid& demand) {
  std::vector<Hotspot> out;
  for (VolumeIdx v = 0; v < demand.num_volumes(); ++v) {
    std::span<const int> g = demand.excess_row(v);
    int t = 0;
    const int n = demand.num_bins();
    while (t < n) {
      if (g[t] <= 0) {
        ++t;
        continue;
      }
      const int start = t;
      while (t < n && g[t] > 0) ++t;
      out.push_back({v, start, t - 1});
    }
  }
  return out;
}

ObjectiveBreakdown combine(std::int64_t j_cap, std::int64_t j_delay, ObjectiveWeights weights) {
  if (weights.w_cap < 0 || weights.w_delay < 0) {
    throw DomainError("objective weights must be nonnegative");
  }
  ObjectiveBreakdown out;
  out.j_cap = j_cap;
  out.j_delay = j_delay;
  out.w_cap = weights.w_cap;
  out.w_delay = weights.w_delay;
  out.j_total = weights.w_cap * static_cast<double>(j_cap) +
                weights.w_delay * static_cast<double>(j_delay);
  return out;
}

ObjectiveBreakdown objective(const DemandGrid& demand, const DelayVector& delays,
                             ObjectiveWeights weights) {
  return combine(demand.total_excess(), delays.total(), weights);
}

ObjectiveBreakdown objective(const Scenario& scenario, const DelayVector& delays,
                             ObjectiveWeights weights) {
  return objective(build_demand(scenario, delays), delays, weights);
}

Evaluation evaluate(const Scenario& scenario, DelayVector delays, ObjectiveWeights weights) {
  Evaluation out;
  out.demand = build_demand(scenario, delays);
  out.objective = objective(out.demand, delays, weights);
  out.delays = std::move(delays);
  return out;
}

}  // namespace rz
