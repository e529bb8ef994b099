#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rz/flows.hpp"

namespace rz {

struct HotCell {
  VolumeIdx tv = 0;
  int bin = 0;
  friend auto operator<=>(const HotCell&, const HotCell&) = default;
};

/// Touched-window bins of the flow's footprint volumes where D >= C.
std::vector<HotCell> hot_cells(const Flow& flow, const DemandGrid& demand,
                               const CapacityProfile& capacities);

/// Flow-attributed demand summed over its hot cells.
int nomrel(const Flow& flow, const DemandGrid& demand, const CapacityProfile& capacities);

struct InLoadParts {
  int before = 0;
  int after = 0;
  int value() const { return before - after; }
};

/// Overflow load in the four bins after each touched window, without and with
/// the flow's touched-window contribution pushed into it.
InLoadParts inload_parts(const Flow& flow, const DemandGrid& demand,
                         const CapacityProfile& capacities);
int inload(const Flow& flow, const DemandGrid& demand, const CapacityProfile& capacities);

struct FlowScore {
  int nomrel = 0;
  int inload = 0;
  double priority = 0.0;
};

struct PriorityParams {
  double band_lo = 25.0;
  double band_hi = 60.0;
  double taper_slope = 0.5;  // per NomRel unit above band_hi
  double inload_weight = 0.5;
};

/// Plateau on [band_lo, band_hi], linear ramp below, linear taper above (floored at 1 for NomRel > 0).
double nomrel_band(int nomrel, const PriorityParams& params = {});
double priority(int nomrel, int inload, std::size_t member_count,
                const PriorityParams& params = {});

FlowScore score_flow(const Flow& flow, const DemandGrid& demand,
                     const CapacityProfile& capacities, const PriorityParams& params = {});

/// Ranking order: positive NomRel first, then priority descending, then flow id.
bool ranks_before(const FlowScore& a, int a_id, const FlowScore& b, int b_id);

/// Indices of `flows` in ranking order.
std::vector<std::size_t> rank_flows(std::span<const Flow> flows, std::span<const FlowScore> scores);

}  // namespace rz
