#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rz/flows.hpp"
#include "rz/fpfs.hpp"
#include "rz/heuristics.hpp"

namespace rz {

struct ProposalParams {
  int k_top = 6;
  int max_flows_in_regulation = 4;
  /// Rate multipliers 1 + gamma for gamma in {-0.4, ..., +0.2}.
  std::vector<double> rate_multipliers = {0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
  double epsilon = 1e-6;
  int max_union = 1;
  ExtractionParams extraction;
  PriorityParams priority;

  void validate() const;
};

struct Proposal {
  Regulation regulation;
  double delta_j = 0.0;
  std::int64_t delta_j_cap = 0;    // excess units removed
  std::int64_t delta_j_delay = 0;  // delay minutes removed (usually negative)
  ObjectiveBreakdown after;
  std::vector<int> flow_ids;
};

/// Overload-weighted share of the hotspot volume's demand carried by `flow`
/// over the effective window. 0 when the window carries no demand.
double demand_share(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario,
                    const DemandGrid& demand, double epsilon);

/// Members entering the effective window at the hotspot volume, per hour.
double hourly_flow_demand(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario);

/// Minimum capacity over the effective window.
int window_min_capacity(const Hotspot& hotspot, const Scenario& scenario);

/// round(min(C_min * share, hourly demand)), at least 1.
int init_rate(const Flow& flow, const Hotspot& hotspot, const Scenario& scenario,
              const DemandGrid& demand, double epsilon);

/// Deduplicated round(tau0 * multiplier), each at least 1, ascending.
std::vector<int> candidate_rates(int tau0, std::span<const double> multipliers);

/// Objective after applying each regulation on top of `base`. Parallel over regulations.
std::vector<ObjectiveBreakdown> score_regulations(const Scenario& scenario, const DelayVector& base,
                                                  std::span<const Regulation> regulations,
                                                  const EngineConfig& config);

namespace reference {
std::vector<ObjectiveBreakdown> score_regulations(const Scenario& scenario, const DelayVector& base,
                                                  std::span<const Regulation> regulations,
                                                  const EngineConfig& config);
}  // namespace reference

/// Rate-tuned proposals for one hotspot, best first, at most k_top.
std::vector<Proposal> propose(const Hotspot& hotspot, const Scenario& scenario,
                              const Evaluation& state, const ProposalParams& params,
                              const EngineConfig& config);

/// Ordering used for proposal lists: delta J descending, then added delay, then regulation.
bool proposal_before(const Proposal& a, const Proposal& b);

}  // namespace rz
