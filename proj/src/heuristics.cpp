#include "rz/heuristics.hpp"

#include <algorithm>
#include <numeric>

namespace rz {

std::vector<HotCell> hot_cells(const Flow& flow, const DemandGrid& demand,
                               const CapacityProfile& capacities) {
  std::vector<HotCell> out;
  for (const TouchedWindow& w : flow.windows) {
    for (int t = w.lo; t <= w.hi; ++t) {
      if (demand.demand(w.tv, t) >= capacities.at(w.tv, t)) out.push_back({w.tv, t});
    }
  }
  return out;
}

int nomrel(const Flow& flow, const DemandGrid& demand, const CapacityProfile& capacities) {
  int total = 0;
  for (const HotCell& cell : hot_cells(flow, demand, capacities)) {
    total += flow.window_at(cell.tv)->attributed_demand[cell.bin];
  }
  return total;
}

InLoadParts inload_parts(const Flow& flow, const DemandGrid& demand,
                         const CapacityProfile& capacities) {
  InLoadParts parts;
  const int nb = demand.num_bins();
  constexpr int kOverflowBins = 4;
  for (const TouchedWindow& w : flow.windows) {
    int overflow_demand = 0;
    int overflow_capacity = 0;
    for (int t = w.hi + 1; t <= w.hi + kOverflowBins && t < nb; ++t) {
      overflow_demand += demand.demand(w.tv, t);
      overflow_capacity += capacities.at(w.tv, t);
    }
    int pushed = 0;
    for (int t = w.lo; t <= w.hi; ++t) pushed += w.attributed_demand[t];
    parts.before += std::max(overflow_demand - overflow_capacity, 0);
    parts.after += std::max(overflow_demand + pushed - overflow_capacity, 0);
  }
  return parts;
}

int inload(const Flow& flow, const DemandGrid& demand, const CapacityProfile& capacities) {
  return inload_parts(flow, demand, capacities).value();
}

double nomrel_band(int nomrel, const PriorityParams& p) {
  const double n = static_cast<double>(nomrel);
  if (n <= 0.0) return 0.0;
  if (n < p.band_lo) return n;
  if (n <= p.band_hi) return p.band_lo;
  return std::max(1.0, p.band_lo - p.taper_slope * (n - p.band_hi));
}

double priority(int nomrel, int inload, std::size_t /*member_count*/, const PriorityParams& p) {
  // Flow size enters through the NomRel taper: large flows accumulate large NomRel.
  return nomrel_band(nomrel, p) + p.inload_weight * std::min(inload, 0);
}

FlowScore score_flow(const Flow& flow, const DemandGrid& demand,
                     const CapacityProfile& capacities, const PriorityParams& params) {
  FlowScore s;
  s.nomrel = nomrel(flow, demand, capacities);
  s.inload = inload(flow, demand, capacities);
  s.priority = priority(s.nomrel, s.inload, flow.members.size(), params);
  return s;
}

bool ranks_before(const FlowScore& a, int a_id, const FlowScore& b, int b_id) {
  const bool a_pos = a.nomrel > 0;
  const bool b_pos = b.nomrel > 0;
  if (a_pos != b_pos) return a_pos;
  if (a.priority != b.priority) return a.priority > b.priority;
  return a_id < b_id;
}

std::vector<std::size_t> rank_flows(std::span<const Flow> flows,
                                    std::span<const FlowScore> scores) {
  std::vector<std::size_t> order(flows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return ranks_before(scores[i], flows[i].id, scores[j], flows[j].id);
  });
  return order;
}

}  // namespace rz
