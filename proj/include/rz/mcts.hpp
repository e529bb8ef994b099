#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rz/fpfs.hpp"
#include "rz/proposals.hpp"
#include "rz/random.hpp"
#include "rz/runlog.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

struct SearchParams {
  int sims = 128;
  int depth = 64;
  int commit_depth = 64;
  double gamma = 0.999998;
  double puct_c = 64.0;
  double tau_hotspot = 6.0;
  double tau_proposal = 24.0;
  int max_hotspots_per_node = 20;
  std::uint64_t seed = 0;
  /// Search, commit one regulation, search again from the new state.
  bool receding_horizon = false;
  /// End a descent at the first newly created node (leaf value 0); otherwise
  /// every descent runs to `depth` or a terminal state.
  bool stop_at_new_node = true;
  /// Wall-clock cap on the simulation loop; 0 disables it.
  double max_seconds = 0.0;
  ProposalParams proposals;

  void validate() const;
};

/// Cumulative excess over the hotspot's bins at its volume.
double severity(const Hotspot& hotspot, const DemandGrid& demand);

/// Numerically stable softmax of scores / temperature.
std::vector<double> softmax(std::span<const double> scores, double temperature);

/// PUCT argmax: q + c * prior * sqrt(sum visits) / (1 + visits).
/// Ties go to the higher prior, then the lower index.
std::size_t puct_select(std::span<const double> q, std::span<const double> prior,
                        std::span<const std::int64_t> visits, double c);

struct SearchNode;

struct ProposalEdge {
  Proposal proposal;
  double prior = 0.0;
  std::int64_t visits = 0;
  double value_sum = 0.0;
  std::unique_ptr<SearchNode> child;

  double q() const { return visits > 0 ? value_sum / static_cast<double>(visits) : 0.0; }
};

struct HotspotBranch {
  Hotspot hotspot;
  double severity = 0.0;
  double prior = 0.0;  // softmax over the node's candidates
  bool expanded = false;
  bool unactionable = false;
  std::vector<ProposalEdge> edges;

  std::int64_t visits() const;
};

/// Tree node. Demand is rebuilt from the delays when needed rather than stored.
struct SearchNode {
  std::uint64_t key = 0;  // hash of the regulation sequence leading here
  DelayVector delays;
  ObjectiveBreakdown objective;
  bool branches_ready = false;
  std::vector<HotspotBranch> branches;  // top hotspots by severity
  std::int64_t visits = 0;

  /// True once branches are known and none is actionable.
  bool terminal() const;
};

/// Root-level statistics for one (hotspot, proposal) pair.
struct RootChoice {
  Hotspot hotspot;
  double hotspot_prior = 0.0;
  Proposal proposal;
  double prior = 0.0;
  std::int64_t visits = 0;
  double q = 0.0;
};

struct SearchStats {
  std::int64_t simulations = 0;
  std::int64_t nodes = 0;
  std::int64_t expansions = 0;
  double elapsed_ms = 0.0;
  bool time_limited = false;
};

struct SearchResult {
  Plan plan;
  RunLog log;
  SearchStats stats;
  std::vector<RootChoice> root;
};

/// Hierarchical PUCT search over (hotspot, proposal) actions from one root state.
class MctsPlanner {
 public:
  MctsPlanner(const Scenario& scenario, SearchParams params, EngineConfig config,
              DelayVector start);

  /// Runs up to `sims` simulations; stops early when the time cap (seconds)
  /// passes or `cancel` becomes true.
  void simulate(int sims, double max_seconds = 0.0, const std::atomic<bool>* cancel = nullptr);

  /// Largest-Q chain from the root, at most `max_steps` regulations.
  std::vector<Regulation> principal_variation(int max_steps) const;
  /// Best root action by Q, if any has been visited.
  std::optional<Regulation> best_root_action() const;
  std::vector<RootChoice> root_choices() const;

  const SearchNode& root() const { return *root_; }
  const SearchStats& stats() const { return stats_; }

 private:
  struct Step {
    SearchNode* node;
    std::size_t branch;
    std::size_t edge;
  };

  void ensure_branches(SearchNode& node, std::optional<Evaluation>& eval);
  void expand(SearchNode& node, HotspotBranch& branch, std::optional<Evaluation>& eval);
  std::unique_ptr<SearchNode> make_child(const SearchNode& parent, const Regulation& reg);
  void run_one();

  const Scenario* scenario_;
  SearchParams params_;
  EngineConfig config_;
  std::unique_ptr<SearchNode> root_;
  std::mt19937_64 rng_;
  SearchStats stats_;
};

/// Searches from `start` (undelayed when empty) and commits the principal
/// variation, or one action per search in receding-horizon mode. The committed
/// sequence is replayed and cut at its best cumulative prefix.
SearchResult run_search(const Scenario& scenario, const SearchParams& params,
                        const EngineConfig& config, const DelayVector* start = nullptr,
                        bool log_timing = true);

/// Myopic ablation: apply the single best proposal over all current hotspots
/// until the budget is spent or nothing improves J.
SearchResult brpp(const Scenario& scenario, int budget, const ProposalParams& params,
                  const EngineConfig& config, const DelayVector* start = nullptr,
                  bool log_timing = true);

/// RunLog rows for a replayed plan.
RunLog plan_log(const Scenario& scenario, const Plan& plan, std::string algorithm,
                std::span<const double> elapsed_ms = {});

}  // namespace rz
