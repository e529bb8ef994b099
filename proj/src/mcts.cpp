#include "rz/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace rz {

void SearchParams::validate() const {
  if (sims < 1) throw ValidationError("sims must be >= 1");
  if (depth < 1) throw ValidationError("depth must be >= 1");
  if (commit_depth < 1) throw ValidationError("commit_depth must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(puct_c >= 0.0)) throw ValidationError("puct_c must be >= 0");
  if (!(tau_hotspot > 0.0) || !(tau_proposal > 0.0)) {
    throw ValidationError("temperatures must be positive");
  }
  if (max_hotspots_per_node < 1) throw ValidationError("max_hotspots_per_node must be >= 1");
  if (max_seconds < 0.0) throw ValidationError("max_seconds must be >= 0");
  proposals.validate();
}

double severity(const Hotspot& hotspot, const DemandGrid& demand) {
  double total = 0.0;
  for (int t = hotspot.t_start; t <= hotspot.t_end; ++t) total += demand.excess(hotspot.tv, t);
  return total;
}

std::vector<double> softmax(std::span<const double> scores, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("softmax temperature must be positive");
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - top) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::size_t puct_select(std::span<const double> q, std::span<const double> prior,
                        std::span<const std::int64_t> visits, double c) {
  std::int64_t total = 0;
  for (std::int64_t n : visits) total += n;
  const double root = std::sqrt(static_cast<double>(total));
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double score = q[i] + c * prior[i] * root / (1.0 + static_cast<double>(visits[i]));
    if (i == 0 || score > best_score || (score == best_score && prior[i] > prior[best])) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

std::int64_t HotspotBranch::visits() const {
  std::int64_t n = 0;
  for (const ProposalEdge& e : edges) n += e.visits;
  return n;
}

bool SearchNode::terminal() const {
  if (!branches_ready) return false;
  return std::all_of(branches.begin(), branches.end(),
                     [](const HotspotBranch& b) { return b.unactionable; });
}

namespace {

std::uint64_t mix_key(std::uint64_t parent, const std::string& descriptor) {
  std::uint64_t h = parent ^ (std::hash<std::string>{}(descriptor) + 0x9e3779b97f4a7c15ULL +
                              (parent << 6) + (parent >> 2));
  return h;
}

// Visited edge with the largest Q; ties by visits, prior, then position.
const ProposalEdge* best_edge(const SearchNode& node) {
  const ProposalEdge* best = nullptr;
  for (const HotspotBranch& b : node.branches) {
    for (const ProposalEdge& e : b.edges) {
      if (e.visits == 0) continue;
      if (!best || e.q() > best->q() || (e.q() == best->q() && e.visits > best->visits) ||
          (e.q() == best->q() && e.visits == best->visits && e.prior > best->prior)) {
        best = &e;
      }
    }
  }
  return best;
}

}  // namespace

MctsPlanner::MctsPlanner(const Scenario& scenario, SearchParams params, EngineConfig config,
                         DelayVector start)
    : scenario_(&scenario), params_(std::move(params)), config_(config), rng_(params_.seed) {
  params_.validate();
  if (start.size() != scenario.num_flights()) throw ValidationError("start delays size mismatch");
  root_ = std::make_unique<SearchNode>();
  root_->objective = objective(scenario, start, config_.weights);
  root_->delays = std::move(start);
  stats_.nodes = 1;
}

void MctsPlanner::ensure_branches(SearchNode& node, std::optional<Evaluation>& eval) {
  if (node.branches_ready) return;
  if (!eval) eval = evaluate(*scenario_, node.delays, config_.weights);
  std::vector<HotspotBranch> branches;
  for (const Hotspot& h : detect_hotspots(eval->demand)) {
    HotspotBranch b;
    b.hotspot = h;
    b.severity = severity(h, eval->demand);
    branches.push_back(std::move(b));
  }
  std::stable_sort(branches.begin(), branches.end(),
                   [](const HotspotBranch& a, const HotspotBranch& b) {
                     return a.severity > b.severity;
                   });
  if (branches.size() > static_cast<std::size_t>(params_.max_hotspots_per_node)) {
    branches.resize(params_.max_hotspots_per_node);
  }
  std::vector<double> sev;
  for (const HotspotBranch& b : branches) sev.push_back(b.severity);
  const std::vector<double> prior = softmax(sev, params_.tau_hotspot);
  for (std::size_t i = 0; i < branches.size(); ++i) branches[i].prior = prior[i];
  node.branches = std::move(branches);
  node.branches_ready = true;
}

void MctsPlanner::expand(SearchNode& node, HotspotBranch& branch, std::optional<Evaluation>& eval) {
  if (!eval) eval = evaluate(*scenario_, node.delays, config_.weights);
  std::vector<Proposal> proposals =
      propose(branch.hotspot, *scenario_, *eval, params_.proposals, config_);
  branch.expanded = true;
  ++stats_.expansions;
  if (proposals.empty()) {
    branch.unactionable = true;
    return;
  }
  std::vector<double> scores;
  for (const Proposal& p : proposals) scores.push_back(p.delta_j);
  const std::vector<double> prior = softmax(scores, params_.tau_proposal);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    ProposalEdge e;
    e.proposal = std::move(proposals[i]);
    e.prior = prior[i];
    branch.edges.push_back(std::move(e));
  }
}

std::unique_ptr<SearchNode> MctsPlanner::make_child(const SearchNode& parent, const Regulation& reg) {
  auto child = std::make_unique<SearchNode>();
  child->key = mix_key(parent.key, reg.descriptor(*scenario_));
  child->delays = apply_regulation(*scenario_, parent.delays, reg, config_.max_delay_per_flight_min);
  child->objective = objective(*scenario_, child->delays, config_.weights);
  ++stats_.nodes;
  return child;
}

void MctsPlanner::run_one() {
  SearchNode* node = root_.get();
  std::vector<Step> path;
  std::vector<double> rewards;
  while (path.size() < static_cast<std::size_t>(params_.depth)) {
    std::optional<Evaluation> eval;
    ensure_branches(*node, eval);

    // One hotspot per visit; unactionable draws are dropped and redrawn.
    std::optional<std::size_t> chosen;
    for (;;) {
      std::vector<double> weights(node->branches.size(), 0.0);
      double top = -1.0;
      for (const HotspotBranch& b : node->branches) {
        if (!b.unactionable) top = std::max(top, b.severity);
      }
      bool any = false;
      for (std::size_t i = 0; i < node->branches.size(); ++i) {
        const HotspotBranch& b = node->branches[i];
        if (b.unactionable) continue;
        weights[i] = std::exp((b.severity - top) / params_.tau_hotspot);
        any = true;
      }
      if (!any) break;
      const std::size_t b = sample_index(weights, rng_);
      HotspotBranch& branch = node->branches[b];
      if (!branch.expanded) expand(*node, branch, eval);
      if (branch.unactionable) continue;
      chosen = b;
      break;
    }
    if (!chosen) break;

    HotspotBranch& branch = node->branches[*chosen];
    std::vector<double> q;
    std::vector<double> prior;
    std::vector<std::int64_t> visits;
    for (const ProposalEdge& e : branch.edges) {
      q.push_back(e.q());
      prior.push_back(e.prior);
      visits.push_back(e.visits);
    }
    const std::size_t e = puct_select(q, prior, visits, params_.puct_c);
    ProposalEdge& edge = branch.edges[e];
    const bool fresh = !edge.child;
    if (fresh) edge.child = make_child(*node, edge.proposal.regulation);
    rewards.push_back(node->objective.j_total - edge.child->objective.j_total);
    path.push_back({node, *chosen, e});
    node = edge.child.get();
    if (fresh && params_.stop_at_new_node) break;
  }

  double ret = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    ret += discount * r;
    discount *= params_.gamma;
  }
  for (const Step& s : path) {
    ProposalEdge& edge = s.node->branches[s.branch].edges[s.edge];
    ++s.node->visits;
    ++edge.visits;
    edge.value_sum += ret;
  }
}

void MctsPlanner::simulate(int sims, double max_seconds, const std::atomic<bool>* cancel) {
  Stopwatch clock;
  for (int i = 0; i < sims; ++i) {
    if (cancel && cancel->load(std::memory_order_relaxed)) break;
    if (max_seconds > 0.0 && clock.elapsed_s() >= max_seconds) {
      stats_.time_limited = true;
      break;
    }
    run_one();
    ++stats_.simulations;
    if (root_->terminal()) break;
  }
  stats_.elapsed_ms += clock.elapsed_ms();
}

std::vector<Regulation> MctsPlanner::principal_variation(int max_steps) const {
  std::vector<Regulation> out;
  const SearchNode* node = root_.get();
  while (node && out.size() < static_cast<std::size_t>(max_steps)) {
    const ProposalEdge* e = best_edge(*node);
    if (!e) break;
    out.push_back(e->proposal.regulation);
    node = e->child.get();
  }
  return out;
}

std::optional<Regulation> MctsPlanner::best_root_action() const {
  const ProposalEdge* e = best_edge(*root_);
  if (!e) return std::nullopt;
  return e->proposal.regulation;
}

std::vector<RootChoice> MctsPlanner::root_choices() const {
  std::vector<RootChoice> out;
  for (const HotspotBranch& b : root_->branches) {
    for (const ProposalEdge& e : b.edges) {
      RootChoice c;
      c.hotspot = b.hotspot;
      c.hotspot_prior = b.prior;
      c.proposal = e.proposal;
      c.prior = e.prior;
      c.visits = e.visits;
      c.q = e.q();
      out.push_back(std::move(c));
    }
  }
  return out;
}

RunLog plan_log(const Scenario& scenario, const Plan& plan, std::string algorithm,
                std::span<const double> elapsed_ms) {
  RunLog log;
  log.algorithm = std::move(algorithm);
  double cum = 0.0;
  for (std::size_t i = 0; i < plan.regulations.size(); ++i) {
    RunLogRow row;
    row.step = static_cast<std::int64_t>(i + 1);
    row.delta_j = plan.delta_j[i];
    cum += plan.delta_j[i];
    row.cum_delta_j = cum;
    row.j_cap = plan.after[i].j_cap;
    row.j_delay = plan.after[i].j_delay;
    row.descriptor = plan.regulations[i].descriptor(scenario);
    row.elapsed_ms = i < elapsed_ms.size() ? elapsed_ms[i] : 0.0;
    log.rows.push_back(std::move(row));
  }
  return log;
}

namespace {

// Keeps the prefix with the largest cumulative improvement; empty if none is positive.
std::size_t best_prefix(const Plan& plan) {
  double cum = 0.0;
  double best = 0.0;
  std::size_t len = 0;
  for (std::size_t i = 0; i < plan.delta_j.size(); ++i) {
    cum += plan.delta_j[i];
    if (cum > best) {
      best = cum;
      len = i + 1;
    }
  }
  return len;
}

}  // namespace

SearchResult run_search(const Scenario& scenario, const SearchParams& params,
                        const EngineConfig& config, const DelayVector* start, bool log_timing) {
  params.validate();
  Stopwatch clock;
  const DelayVector origin = start ? *start : DelayVector(scenario.num_flights());
  SearchResult result;
  std::vector<Regulation> regs;
  std::vector<double> elapsed;

  if (!params.receding_horizon) {
    MctsPlanner planner(scenario, params, config, origin);
    planner.simulate(params.sims, params.max_seconds);
    regs = planner.principal_variation(params.commit_depth);
    result.root = planner.root_choices();
    result.stats = planner.stats();
    elapsed.assign(regs.size(), clock.elapsed_ms());
  } else {
    DelayVector current = origin;
    for (int step = 0; step < params.commit_depth; ++step) {
      double remaining = 0.0;
      if (params.max_seconds > 0.0) {
        remaining = params.max_seconds - clock.elapsed_s();
        if (remaining <= 0.0) {
          result.stats.time_limited = true;
          break;
        }
      }
      SearchParams round = params;
      round.seed = params.seed + static_cast<std::uint64_t>(step) * 0x9e3779b97f4a7c15ULL;
      MctsPlanner planner(scenario, round, config, current);
      planner.simulate(params.sims, remaining);
      if (step == 0) result.root = planner.root_choices();
      const SearchStats& s = planner.stats();
      result.stats.simulations += s.simulations;
      result.stats.nodes += s.nodes;
      result.stats.expansions += s.expansions;
      result.stats.time_limited = result.stats.time_limited || s.time_limited;
      const std::optional<Regulation> action = planner.best_root_action();
      if (!action) break;
      current = apply_regulation(scenario, std::move(current), *action,
                                 config.max_delay_per_flight_min);
      regs.push_back(*action);
      elapsed.push_back(clock.elapsed_ms());
    }
  }

  result.plan = build_plan(scenario, origin, regs, config);
  const std::size_t keep = best_prefix(result.plan);
  if (keep < regs.size()) {
    regs.resize(keep);
    elapsed.resize(keep);
    result.plan = build_plan(scenario, origin, regs, config);
  }
  result.stats.elapsed_ms = clock.elapsed_ms();
  if (!log_timing) std::fill(elapsed.begin(), elapsed.end(), 0.0);
  result.log = plan_log(scenario, result.plan, "mcts", elapsed);
  return result;
}

SearchResult brpp(const Scenario& scenario, int budget, const ProposalParams& params,
                  const EngineConfig& config, const DelayVector* start, bool log_timing) {
  params.validate();
  Stopwatch clock;
  const DelayVector origin = start ? *start : DelayVector(scenario.num_flights());
  Evaluation state = evaluate(scenario, origin, config.weights);
  std::vector<Regulation> regs;
  std::vector<double> elapsed;
  for (int step = 0; step < budget; ++step) {
    std::optional<Proposal> best;
    for (const Hotspot& h : detect_hotspots(state.demand)) {
      std::vector<Proposal> ps = propose(h, scenario, state, params, config);
      if (!ps.empty() && (!best || proposal_before(ps.front(), *best))) best = std::move(ps.front());
    }
    if (!best || best->delta_j <= 0.0) break;
    DelayVector next = apply_regulation(scenario, state.delays, best->regulation,
                                        config.max_delay_per_flight_min);
    state = evaluate(scenario, std::move(next), config.weights);
    regs.push_back(best->regulation);
    elapsed.push_back(clock.elapsed_ms());
  }
  SearchResult result;
  result.plan = build_plan(scenario, origin, regs, config);
  result.stats.elapsed_ms = clock.elapsed_ms();
  if (!log_timing) std::fill(elapsed.begin(), elapsed.end(), 0.0);
  result.log = plan_log(scenario, result.plan, "brpp", elapsed);
  return result;
}

}  // namespace rz
