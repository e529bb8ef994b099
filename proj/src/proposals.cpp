#include "rz/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace rz {

void ProposalParams::validate() const {
  if (k_top < 1) throw ValidationError("k_top must be >= 1");
  if (max_flows_in_regulation < 1) throw ValidationError("max_flows_in_regulation must be >= 1");
  if (rate_multipliers.empty()) throw ValidationError("rate grid must be nonempty");
  for (double m : rate_multipliers) {
    if (!(m > 0.0)) throw ValidationError("rate multipliers must be positive");
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (max_union < 1) throw ValidationError("max_union must be >= 1");
  extraction.validate();
}

double demand_share(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario,
                    const DemandGrid& demand, double epsilon) {
  const TouchedWindow* w = flow.window_at(hotspot.tv);
  const auto [lo, hi] = effective_window(hotspot.t_start, hotspot.t_end, scenario.grid());
  double num = 0.0;
  double den = 0.0;
  for (int t = lo; t <= hi; ++t) {
    const double weight = demand.excess(hotspot.tv, t) + epsilon;
    if (w) num += weight * w->attributed_demand[t];
    den += weight * demand.demand(hotspot.tv, t);
  }
  return den > 0.0 ? num / den : 0.0;
}

double hourly_flow_demand(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario) {
  const TimeGrid& grid = scenario.grid();
  const auto [lo, hi] = effective_window(hotspot.t_start, hotspot.t_end, grid);
  const TouchedWindow* w = flow.window_at(hotspot.tv);
  if (!w) return 0.0;
  int entering = 0;
  for (int t = lo; t <= hi; ++t) entering += w->attributed_entries[t];
  const double hours = static_cast<double>((hi - lo + 1) * grid.bin_width_min) / 60.0;
  return static_cast<double>(entering) / hours;
}

int window_min_capacity(const Hotspot& hotspot, const Scenario& scenario) {
  const auto [lo, hi] = effective_window(hotspot.t_start, hotspot.t_end, scenario.grid());
  int c_min = scenario.capacities().at(hotspot.tv, lo);
  for (int t = lo + 1; t <= hi; ++t) c_min = std::min(c_min, scenario.capacities().at(hotspot.tv, t));
  return c_min;
}

int init_rate(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario,
              const DemandGrid& demand, double epsilon) {
  const double share = demand_share(flow, hotspot, scenario, demand, epsilon);
  const double by_capacity = window_min_capacity(hotspot, scenario) * share;
  const double tau0 = std::min(by_capacity, hourly_flow_demand(flow, hotspot, scenario));
  return std::max(1, static_cast<int>(std::lround(tau0)));
}

std::vector<int> candidate_rates(int tau0, std::span<const double> multipliers) {
  std::set<int> rates;
  for (double m : multipliers) {
    rates.insert(std::max(1, static_cast<int>(std::lround(tau0 * m))));
  }
  return {rates.begin(), rates.end()};
}

std::vector<ObjectiveBreakdown> score_regulations(const Scenario& scenario, const DelayVector& base,
                                                  std::span<const Regulation> regulations,
                                                  const EngineConfig& config) {
  std::vector<ObjectiveBreakdown> out(regulations.size());
  const auto n = static_cast<std::int64_t>(regulations.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const DelayVector delays =
        apply_regulation(scenario, base, regulations[i], config.max_delay_per_flight_min);
    out[i] = objective(scenario, delays, config.weights);
  }
  return out;
}

namespace reference {

std::vector<ObjectiveBreakdown> score_regulations(const Scenario& scenario, const DelayVector& base,
                                                  std::span<const Regulation> regulations,
                                                  const EngineConfig& config) {
  std::vector<ObjectiveBreakdown> out;
  out.reserve(regulations.size());
  for (const Regulation& reg : regulations) {
    const DelayVector delays =
        apply_regulation(scenario, base, reg, config.max_delay_per_flight_min);
    out.push_back(objective(rz::reference::build_demand(scenario, delays), delays, config.weights));
  }
  return out;
}

}  // namespace reference

bool proposal_before(const Proposal& a, const Proposal& b) {
  if (a.delta_j != b.delta_j) return a.delta_j > b.delta_j;
  if (a.after.j_delay != b.after.j_delay) return a.after.j_delay < b.after.j_delay;
  if (a.flow_ids != b.flow_ids) return a.flow_ids < b.flow_ids;
  if (a.regulation.rate_per_hour != b.regulation.rate_per_hour) {
    return a.regulation.rate_per_hour < b.regulation.rate_per_hour;
  }
  return a.regulation.members < b.regulation.members;
}

std::vector<Proposal> propose(const Hotspot& hotspot, const Scenario& scenario,
                              const Evaluation& state, const ProposalParams& params,
                              const EngineConfig& config) {
  params.validate();
  const FlowExtraction extraction = extract_flows(hotspot, scenario, state.delays, params.extraction);
  if (extraction.flows.empty()) return {};
  const auto& flows = extraction.flows;

  std::vector<FlowScore> scores;
  scores.reserve(flows.size());
  for (const Flow& flow : flows) {
    scores.push_back(score_flow(flow, state.demand, scenario.capacities(), params.priority));
  }
  const std::vector<std::size_t> order = rank_flows(flows, scores);
  const std::size_t shortlist =
      std::min(order.size(), static_cast<std::size_t>(params.max_flows_in_regulation));

  // Flow sets: each shortlisted flow alone, then unions of the top-r for r >= 2.
  std::vector<std::pair<std::vector<int>, Flow>> sets;
  for (std::size_t i = 0; i < shortlist; ++i) {
    sets.push_back({{flows[order[i]].id}, flows[order[i]]});
  }
  for (std::size_t r = 2; r <= std::min(shortlist, static_cast<std::size_t>(params.max_union)); ++r) {
    std::vector<int> ids;
    std::vector<FlightIdx> members;
    for (std::size_t i = 0; i < r; ++i) {
      ids.push_back(flows[order[i]].id);
      members.insert(members.end(), flows[order[i]].members.begin(), flows[order[i]].members.end());
    }
    std::sort(ids.begin(), ids.end());
    sets.push_back({ids, make_flow(scenario, state.delays, hotspot, std::move(members))});
  }

  std::vector<Regulation> regulations;
  std::vector<std::vector<int>> owners;
  for (const auto& [ids, flow] : sets) {
    const int tau0 = init_rate(flow, hotspot, scenario, state.demand, params.epsilon);
    for (int rate : candidate_rates(tau0, params.rate_multipliers)) {
      Regulation reg;
      reg.cv = hotspot.tv;
      reg.t_start = hotspot.t_start;
      reg.t_end = hotspot.t_end;
      reg.rate_per_hour = rate;
      reg.members = flow.members;
      regulations.push_back(std::move(reg));
      owners.push_back(ids);
    }
  }

  const std::vector<ObjectiveBreakdown> after =
      score_regulations(scenario, state.delays, regulations, config);
  std::vector<Proposal> out;
  out.reserve(regulations.size());
  for (std::size_t i = 0; i < regulations.size(); ++i) {
    Proposal p;
    p.regulation = std::move(regulations[i]);
    p.after = after[i];
    p.delta_j = state.objective.j_total - after[i].j_total;
    p.delta_j_cap = state.objective.j_cap - after[i].j_cap;
    p.delta_j_delay = state.objective.j_delay - after[i].j_delay;
    p.flow_ids = std::move(owners[i]);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), proposal_before);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Proposal& a, const Proposal& b) {
                          return a.regulation == b.regulation;
                        }),
            out.end());
  if (out.size() > static_cast<std::size_t>(params.k_top)) out.resize(params.k_top);
  return out;
}

}  // namespace rz
