#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rz/traffic_model.hpp"

namespace rz {

/// A metering order at a control volume: active window, hourly rate and the
/// targeted flight set.
struct Regulation {
  VolumeIdx cv = 0;
  int t_start = 0;
  int t_end = 0;
  int rate_per_hour = 1;
  std::vector<FlightIdx> members;  // sorted, unique
  int anchor_margin_bins = 0;

  bool targets(FlightIdx f) const;
  /// Sorts and deduplicates `members`.
  void normalize();
  /// Throws ValidationError on window/rate/member violations, DomainError for an unknown volume.
  void validate(const Scenario& scenario) const;
  /// Compact stable text form, e.g. `TV03[40-43]r12n5`.
  std::string descriptor(const Scenario& scenario) const;

  friend bool operator==(const Regulation&, const Regulation&) = default;
};

/// Inclusive bin range [t_start, t_end + trailing] clipped to the grid.
std::pair<int, int> effective_window(int t_start, int t_end, const TimeGrid& grid);

struct RegulatedFlight {
  FlightIdx flight = 0;
  Ticks entry = 0;  // delay-shifted entry at the control volume

  friend bool operator==(const RegulatedFlight&, const RegulatedFlight&) = default;
};

/// Targeted flights whose shifted entry bin at the control volume falls in
/// the effective window, in FPFS order (entry time, then flight identifier).
std::vector<RegulatedFlight> regulated_flights(const Scenario& scenario, const DelayVector& delays,
                                               const Regulation& reg);

/// Every flight (targeted or not) in the effective window of `reg`'s volume and window.
std::vector<RegulatedFlight> window_flights(const Scenario& scenario, const DelayVector& delays,
                                            VolumeIdx cv, int t_start, int t_end);

struct SlotAssignment {
  FlightIdx flight = 0;
  double entry_min = 0.0;
  double slot_min = 0.0;
  int delay_min = 0;
  bool clamped = false;
  std::int64_t slot_index = 0;
};

/// FPFS metering queue. Slots are spaced 60/rate minutes from the anchor
/// (t_start - anchor_margin) * bin_width; every flight takes the earliest free
/// slot at or after its entry. Delays are whole minutes (ceiling of slot - entry)
/// and are clamped to `max_delay_min` with the flag set.
std::vector<SlotAssignment> allocate(const Regulation& reg,
                                     std::span<const RegulatedFlight> flights,
                                     const TimeGrid& grid, int max_delay_min);

/// Applies one regulation on top of `delays`. Cumulative delay is capped at
/// `max_delay_min`; assignments hit by the cap are flagged.
DelayVector apply_regulation(const Scenario& scenario, DelayVector delays, const Regulation& reg,
                             int max_delay_min, std::vector<SlotAssignment>* assignments = nullptr);

/// Regulations applied one after another; each sees the entries already shifted by its predecessors.
DelayVector compose_sequential(const Scenario& scenario, std::span<const Regulation> regulations,
                               int max_delay_min);

/// Most-penalizing-regulation arbitration: each regulation is allocated against
/// the undelayed traffic and every flight keeps its largest delay.
DelayVector compose_mpr(const Scenario& scenario, std::span<const Regulation> regulations,
                        int max_delay_min);

/// An ordered regulation sequence with its cumulative delays and per-step log.
struct Plan {
  std::vector<Regulation> regulations;
  DelayVector delays;
  std::vector<double> delta_j;            // per step, J(before) - J(after)
  std::vector<ObjectiveBreakdown> after;  // objective after each step
  ObjectiveBreakdown baseline;

  double total_delta_j() const;
  const ObjectiveBreakdown& final_objective() const {
    return after.empty() ? baseline : after.back();
  }
};

/// Replays `regulations` from the undelayed state, logging every step.
Plan build_plan(const Scenario& scenario, std::vector<Regulation> regulations,
                const EngineConfig& config);
/// Same, starting from already-delayed traffic.
Plan build_plan(const Scenario& scenario, DelayVector start, std::vector<Regulation> regulations,
                const EngineConfig& config);

}  // namespace rz
