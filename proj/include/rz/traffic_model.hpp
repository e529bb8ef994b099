#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rz {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when input data violates a scenario or plan invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VolumeIdx = std::uint32_t;
using FlightIdx = std::uint32_t;

/// Times are held internally in tenths of a minute so that slot arithmetic stays exact.
using Ticks = std::int64_t;
inline constexpr Ticks kTicksPerMinute = 10;

inline constexpr Ticks to_ticks(double minutes) {
  const double scaled = minutes * static_cast<double>(kTicksPerMinute);
  return static_cast<Ticks>(scaled >= 0 ? scaled + 0.5 : scaled - 0.5);
}
inline constexpr double to_minutes(Ticks t) {
  return static_cast<double>(t) / static_cast<double>(kTicksPerMinute);
}

struct TimeGrid {
  int bin_width_min = 15;
  int num_bins = 96;
  int rolling_window_bins = 4;

  void validate() const;
  int day_minutes() const { return bin_width_min * num_bins; }
  Ticks day_ticks() const { return static_cast<Ticks>(day_minutes()) * kTicksPerMinute; }
  Ticks bin_ticks() const { return static_cast<Ticks>(bin_width_min) * kTicksPerMinute; }
  /// Bins following a window end that still feed its rolling-hour demand.
  int trailing_bins() const { return rolling_window_bins - 1; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Entry bin of a time in minutes after midnight. Throws DomainError outside the day.
int bin_of(double minutes, const TimeGrid& grid);

/// Entry bin of an in-day tick value; no range check.
inline int bin_of_ticks(Ticks t, const TimeGrid& grid) {
  return static_cast<int>(t / grid.bin_ticks());
}

struct Crossing {
  VolumeIdx tv = 0;
  Ticks entry = 0;
  std::optional<Ticks> exit;

  double entry_min() const { return to_minutes(entry); }
  friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct Flight {
  std::string id;
  std::vector<Crossing> crossings;

  friend bool operator==(const Flight&, const Flight&) = default;
};

/// Hourly entry capacity per (volume, rolling-window start bin).
class CapacityProfile {
 public:
  CapacityProfile() = default;
  CapacityProfile(std::size_t num_volumes, int num_bins, int fill = 0);

  int at(VolumeIdx v, int bin) const { return values_[index(v, bin)]; }
  void set(VolumeIdx v, int bin, int capacity);
  std::span<const int> row(VolumeIdx v) const {
    return {values_.data() + static_cast<std::size_t>(v) * num_bins_, static_cast<std::size_t>(num_bins_)};
  }
  std::size_t num_volumes() const { return num_bins_ == 0 ? 0 : values_.size() / num_bins_; }
  int num_bins() const { return num_bins_; }

  friend bool operator==(const CapacityProfile&, const CapacityProfile&) = default;

 private:
  std::size_t index(VolumeIdx v, int bin) const {
    return static_cast<std::size_t>(v) * num_bins_ + static_cast<std::size_t>(bin);
  }
  int num_bins_ = 0;
  std::vector<int> values_;
};

/// One crossing seen from the volume side.
struct VolumeEntry {
  FlightIdx flight = 0;
  Ticks entry = 0;
};

/// Immutable planning world. Flights are stored sorted by identifier, so the
/// flight index order is the lexicographic identifier order.
class Scenario {
 public:
  Scenario() = default;
  Scenario(TimeGrid grid, std::vector<std::string> volumes, std::vector<Flight> flights,
           CapacityProfile capacities);

  const TimeGrid& grid() const { return grid_; }
  std::span<const Flight> flights() const { return flights_; }
  const Flight& flight(FlightIdx f) const { return flights_[f]; }
  std::span<const std::string> volumes() const { return volumes_; }
  const std::string& volume_name(VolumeIdx v) const { return volumes_[v]; }
  const CapacityProfile& capacities() const { return capacities_; }
  std::size_t num_flights() const { return flights_.size(); }
  std::size_t num_volumes() const { return volumes_.size(); }

  std::optional<VolumeIdx> find_volume(std::string_view name) const;
  std::optional<FlightIdx> find_flight(std::string_view id) const;
  /// Throws DomainError for unknown names.
  VolumeIdx volume_index(std::string_view name) const;
  FlightIdx flight_index(std::string_view id) const;

  /// Undelayed crossings into `v`, sorted by (entry, flight).
  std::span<const VolumeEntry> entries_at(VolumeIdx v) const { return by_volume_[v]; }
  /// Distinct volumes crossed by `f`, ascending.
  std::span<const VolumeIdx> footprint(FlightIdx f) const { return footprints_[f]; }
  /// Undelayed entry of `f` into `v`, if it crosses it.
  std::optional<Ticks> entry_of(FlightIdx f, VolumeIdx v) const;
  std::size_t num_crossings() const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.grid_ == b.grid_ && a.volumes_ == b.volumes_ && a.flights_ == b.flights_ &&
           a.capacities_ == b.capacities_;
  }

 private:
  TimeGrid grid_;
  std::vector<std::string> volumes_;
  std::vector<Flight> flights_;
  CapacityProfile capacities_;
  std::unordered_map<std::string, VolumeIdx> volume_lookup_;
  std::vector<std::vector<VolumeEntry>> by_volume_;
  std::vector<std::vector<VolumeIdx>> footprints_;
};

/// Per-flight integer delay in minutes; flights never touched hold 0.
class DelayVector {
 public:
  DelayVector() = default;
  explicit DelayVector(std::size_t num_flights) : minutes_(num_flights, 0) {}

  int operator[](FlightIdx f) const { return minutes_[f]; }
  int& operator[](FlightIdx f) { return minutes_[f]; }
  std::size_t size() const { return minutes_.size(); }
  std::span<const int> values() const { return minutes_; }

  std::int64_t total() const;
  std::size_t count_delayed() const;
  /// Throws ValidationError if any value is negative or above `max_delay_min`.
  void validate(std::size_t num_flights, int max_delay_min) const;

  friend bool operator==(const DelayVector&, const DelayVector&) = default;

 private:
  std::vector<int> minutes_;
};

/// Entry counts E, rolling-hour demand D and excess G on the (volume, bin) grid.
class DemandGrid {
 public:
  DemandGrid() = default;
  DemandGrid(std::size_t num_volumes, int num_bins);

  int entries(VolumeIdx v, int t) const { return entries_[index(v, t)]; }
  int demand(VolumeIdx v, int t) const { return demand_[index(v, t)]; }
  int excess(VolumeIdx v, int t) const { return excess_[index(v, t)]; }
  std::span<const int> entries_row(VolumeIdx v) const { return row(entries_, v); }
  std::span<const int> demand_row(VolumeIdx v) const { return row(demand_, v); }
  std::span<const int> excess_row(VolumeIdx v) const { return row(excess_, v); }
  std::span<int> entries_row(VolumeIdx v) { return row(entries_, v); }
  std::span<int> demand_row(VolumeIdx v) { return row(demand_, v); }
  std::span<int> excess_row(VolumeIdx v) { return row(excess_, v); }

  std::size_t num_volumes() const { return num_volumes_; }
  int num_bins() const { return num_bins_; }
  std::int64_t total_excess() const;

  friend bool operator==(const DemandGrid&, const DemandGrid&) = default;

 private:
  std::size_t index(VolumeIdx v, int t) const {
    return static_cast<std::size_t>(v) * num_bins_ + static_cast<std::size_t>(t);
  }
  std::span<const int> row(const std::vector<int>& values, VolumeIdx v) const {
    return {values.data() + index(v, 0), static_cast<std::size_t>(num_bins_)};
  }
  std::span<int> row(std::vector<int>& values, VolumeIdx v) {
    return {values.data() + index(v, 0), static_cast<std::size_t>(num_bins_)};
  }

  std::size_t num_volumes_ = 0;
  int num_bins_ = 0;
  std::vector<int> entries_;
  std::vector<int> demand_;
  std::vector<int> excess_;
};

/// Fills D and G of one volume row from its entry counts.
void roll_demand_row(std::span<const int> entries, std::span<const int> capacity, int window,
                     std::span<int> demand, std::span<int> excess);

/// Demand under uniformly shifted trajectories. Entries pushed past the end of
/// the day are dropped from the grid. Parallel over volumes.
DemandGrid build_demand(const Scenario& scenario, const DelayVector& delays);

namespace reference {
/// Serial flight-by-flight version of build_demand, kept as a test oracle.
DemandGrid build_demand(const Scenario& scenario, const DelayVector& delays);
}  // namespace reference

struct Hotspot {
  VolumeIdx tv = 0;
  int t_start = 0;
  int t_end = 0;

  friend auto operator<=>(const Hotspot&, const Hotspot&) = default;
};

/// All maximal runs of positive excess, sorted by (volume, start).
std::vector<Hotspot> detect_hotspots(const DemandGrid& demand);

struct ObjectiveWeights {
  double w_cap = 10.0;
  double w_delay = 1.0;
};

struct ObjectiveBreakdown {
  std::int64_t j_cap = 0;
  std::int64_t j_delay = 0;
  double j_total = 0.0;
  double w_cap = 10.0;
  double w_delay = 1.0;

  friend bool operator==(const ObjectiveBreakdown&, const ObjectiveBreakdown&) = default;
};

ObjectiveBreakdown combine(std::int64_t j_cap, std::int64_t j_delay, ObjectiveWeights weights);
ObjectiveBreakdown objective(const DemandGrid& demand, const DelayVector& delays,
                             ObjectiveWeights weights);
ObjectiveBreakdown objective(const Scenario& scenario, const DelayVector& delays,
                             ObjectiveWeights weights = {});

/// Delays together with the demand and objective they induce.
struct Evaluation {
  DelayVector delays;
  DemandGrid demand;
  ObjectiveBreakdown objective;
};

Evaluation evaluate(const Scenario& scenario, DelayVector delays, ObjectiveWeights weights);

/// Shared knobs every engine needs to evaluate a state.
struct EngineConfig {
  ObjectiveWeights weights;
  int max_delay_per_flight_min = 120;
};

}  // namespace rz
