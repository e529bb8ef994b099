#include "rz/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "rz/mcts.hpp"
#include "rz/random.hpp"

namespace rz {

namespace {

void check_steps(const std::vector<int>& steps) {
  if (steps.empty()) throw ValidationError("step choices must be nonempty");
  for (int s : steps) {
    if (s <= 0) throw ValidationError("step choices must be positive");
  }
}

std::string move_descriptor(const Scenario& scenario, FlightIdx f, int from, int to) {
  return scenario.flight(f).id + ":" + std::to_string(from) + "->" + std::to_string(to);
}

}  // namespace

void SaParams::validate() const {
  if (iters < 0) throw ValidationError("iters must be >= 0");
  if (!(t0 > 0.0)) throw ValidationError("t0 must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) throw ValidationError("cooling must lie in (0, 1)");
  if (!(t_min > 0.0)) throw ValidationError("t_min must be positive");
  if (max_delay < 0) throw ValidationError("max_delay must be >= 0");
  check_steps(step_choices);
}

void GaParams::validate() const {
  if (population_size < 2) throw ValidationError("population_size must be >= 2");
  if (generations < 0) throw ValidationError("generations must be >= 0");
  if (!(p_crossover >= 0.0 && p_crossover <= 1.0)) throw ValidationError("p_crossover must lie in [0, 1]");
  if (mutations_per_child < 0) throw ValidationError("mutations_per_child must be >= 0");
  if (!(mutate_existing_prob >= 0.0 && mutate_existing_prob <= 1.0)) {
    throw ValidationError("mutate_existing_prob must lie in [0, 1]");
  }
  if (init_delayed_flights_min < 0 || init_delayed_flights_max < init_delayed_flights_min) {
    throw ValidationError("init delayed flight range is invalid");
  }
  if (max_delay < 0) throw ValidationError("max_delay must be >= 0");
  check_steps(step_choices);
}

std::vector<double> hot_cell_weights(const Scenario& scenario, const DelayVector& delays,
                                     const DemandGrid& demand) {
  const TimeGrid& grid = scenario.grid();
  const Ticks day = grid.day_ticks();
  std::vector<double> w(scenario.num_flights(), 1.0);
  for (FlightIdx f = 0; f < scenario.num_flights(); ++f) {
    int hot = 0;
    for (const Crossing& c : scenario.flight(f).crossings) {
      const Ticks shifted = c.entry + static_cast<Ticks>(delays[f]) * kTicksPerMinute;
      if (shifted >= day) continue;
      const int b = bin_of_ticks(shifted, grid);
      // Window starts whose rolling hour includes bin b.
      for (int t = std::max(0, b - grid.trailing_bins()); t <= b; ++t) {
        if (demand.excess(c.tv, t) > 0) ++hot;
      }
    }
    w[f] += hot;
  }
  return w;
}

FlightIdx hot_cell_weighted_flight_pick(const Scenario& scenario, const DelayVector& delays,
                                        const DemandGrid& demand, std::mt19937_64& rng) {
  const std::vector<double> w = hot_cell_weights(scenario, delays, demand);
  return static_cast<FlightIdx>(sample_index(w, rng));
}

IncrementalDemand::IncrementalDemand(const Scenario& scenario, DelayVector delays,
                                     ObjectiveWeights weights)
    : scenario_(&scenario), weights_(weights), delays_(std::move(delays)) {
  demand_ = build_demand(scenario, delays_);
  j_cap_ = demand_.total_excess();
}

void IncrementalDemand::shift_entries(FlightIdx f, int delay, int sign) {
  const TimeGrid& grid = scenario_->grid();
  for (const Crossing& c : scenario_->flight(f).crossings) {
    const Ticks shifted = c.entry + static_cast<Ticks>(delay) * kTicksPerMinute;
    if (shifted >= grid.day_ticks()) continue;
    demand_.entries_row(c.tv)[bin_of_ticks(shifted, grid)] += sign;
  }
}

void IncrementalDemand::reroll(VolumeIdx v) {
  std::int64_t before = 0;
  for (int g : demand_.excess_row(v)) before += g;
  roll_demand_row(demand_.entries_row(v), scenario_->capacities().row(v),
                  scenario_->grid().rolling_window_bins, demand_.demand_row(v),
                  demand_.excess_row(v));
  std::int64_t after = 0;
  for (int g : demand_.excess_row(v)) after += g;
  j_cap_ += after - before;
}

void IncrementalDemand::set_delay(FlightIdx f, int minutes) {
  if (minutes == delays_[f]) return;
  shift_entries(f, delays_[f], -1);
  shift_entries(f, minutes, +1);
  delays_[f] = minutes;
  for (VolumeIdx v : scenario_->footprint(f)) reroll(v);
}

SaResult run_sa(const Scenario& scenario, const SaParams& params, const EngineConfig& config,
                bool log_timing) {
  params.validate();
  Stopwatch clock;
  std::mt19937_64 rng(params.seed);
  IncrementalDemand state(scenario, DelayVector(scenario.num_flights()), config.weights);
  SaResult result;
  result.baseline = state.objective();
  result.delays = state.delays();
  result.objective = result.baseline;
  result.log.algorithm = "sa";
  if (scenario.num_flights() == 0) return result;

  double temperature = params.t0;
  double current = result.baseline.j_total;
  for (int it = 1; it <= params.iters; ++it) {
    if (params.max_seconds > 0.0 && clock.elapsed_s() >= params.max_seconds) break;
    const FlightIdx f = hot_cell_weighted_flight_pick(scenario, state.delays(), state.demand(), rng);
    const int step = params.step_choices[uniform_below(rng, params.step_choices.size())];
    const int sign = (rng() & 1U) ? 1 : -1;
    const int old = state.delays()[f];
    const int proposed = std::clamp(old + sign * step, 0, params.max_delay);
    if (proposed != old) {
      state.set_delay(f, proposed);
      const double next = state.objective().j_total;
      const double worse = next - current;
      const bool accept = worse <= 0.0 || uniform01(rng) < std::exp(-worse / temperature);
      if (accept) {
        current = next;
        ++result.accepted;
        if (current < result.objective.j_total) {
          const ObjectiveBreakdown obj = state.objective();
          RunLogRow row;
          row.step = it;
          row.delta_j = result.objective.j_total - obj.j_total;
          row.cum_delta_j = result.baseline.j_total - obj.j_total;
          row.j_cap = obj.j_cap;
          row.j_delay = obj.j_delay;
          row.descriptor = move_descriptor(scenario, f, old, proposed);
          row.elapsed_ms = log_timing ? clock.elapsed_ms() : 0.0;
          result.log.rows.push_back(std::move(row));
          result.objective = obj;
          result.delays = state.delays();
        }
      } else {
        state.set_delay(f, old);
      }
    }
    temperature = std::max(temperature * params.cooling, params.t_min);
  }
  return result;
}

bool dominates(const ObjectiveBreakdown& a, const ObjectiveBreakdown& b) {
  return a.j_cap <= b.j_cap && a.j_delay <= b.j_delay &&
         (a.j_cap < b.j_cap || a.j_delay < b.j_delay);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveBreakdown>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(pts[i], pts[j])) {
        dominated[i].push_back(j);
      } else if (dominates(pts[j], pts[i])) {
        ++count[i];
      }
    }
    if (count[i] == 0) fronts[0].push_back(i);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts.back()) {
      for (std::size_t j : dominated[i]) {
        if (--count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveBreakdown>& pts,
                                      const std::vector<std::size_t>& front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  auto accumulate_axis = [&](auto key) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return key(pts[front[a]]) < key(pts[front[b]]);
    });
    const double lo = key(pts[front[order.front()]]);
    const double hi = key(pts[front[order.back()]]);
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi == lo) return;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      dist[order[k]] += (key(pts[front[order[k + 1]]]) - key(pts[front[order[k - 1]]])) / (hi - lo);
    }
  };
  accumulate_axis([](const ObjectiveBreakdown& o) { return static_cast<double>(o.j_cap); });
  accumulate_axis([](const ObjectiveBreakdown& o) { return static_cast<double>(o.j_delay); });
  return dist;
}

namespace {

struct Ranked {
  int rank = 0;
  double crowding = 0.0;
};

// Rank and crowding for every member of a population.
std::vector<Ranked> rank_population(const std::vector<GaIndividual>& pop,
                                    std::vector<std::vector<std::size_t>>* fronts_out = nullptr) {
  std::vector<ObjectiveBreakdown> pts;
  for (const GaIndividual& g : pop) pts.push_back(g.objective);
  const auto fronts = non_dominated_sort(pts);
  std::vector<Ranked> out(pop.size());
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const std::vector<double> cd = crowding_distance(pts, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      out[fronts[r][k]] = {static_cast<int>(r), cd[k]};
    }
  }
  if (fronts_out) *fronts_out = fronts;
  return out;
}

bool better(const Ranked& a, const Ranked& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

bool weighted_before(const ObjectiveBreakdown& a, const ObjectiveBreakdown& b) {
  if (a.j_total != b.j_total) return a.j_total < b.j_total;
  return a.j_delay < b.j_delay;
}

void evaluate_all(const Scenario& scenario, std::vector<GaIndividual>& pop, ObjectiveWeights weights) {
  const auto n = static_cast<std::int64_t>(pop.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    pop[i].objective = objective(scenario, pop[i].delays, weights);
  }
}

// Adds candidates to a non-dominated archive; identical objective points are kept once.
void update_archive(std::vector<GaIndividual>& archive, const std::vector<GaIndividual>& candidates) {
  for (const GaIndividual& c : candidates) {
    bool skip = false;
    for (const GaIndividual& a : archive) {
      if (dominates(a.objective, c.objective) ||
          (a.objective.j_cap == c.objective.j_cap && a.objective.j_delay == c.objective.j_delay)) {
        skip = true;
        break;
      }
    }
    if (skip) continue;
    std::erase_if(archive, [&](const GaIndividual& a) { return dominates(c.objective, a.objective); });
    archive.push_back(c);
  }
}

}  // namespace

GaResult run_nsga2(const Scenario& scenario, const GaParams& params, const EngineConfig& config,
                   bool log_timing) {
  params.validate();
  Stopwatch clock;
  std::mt19937_64 rng(params.seed);
  const std::size_t n = scenario.num_flights();
  const DelayVector zero(n);
  const DemandGrid base_demand = build_demand(scenario, zero);
  // Move kernel weights are taken from the undelayed state.
  const std::vector<double> weights = hot_cell_weights(scenario, zero, base_demand);

  GaResult result;
  result.baseline = objective(base_demand, zero, config.weights);
  result.log.algorithm = "nsga2";
  result.selected = {zero, result.baseline};
  if (n == 0) {
    result.archive.push_back(result.selected);
    return result;
  }

  auto pick_step = [&] {
    return params.step_choices[uniform_below(rng, params.step_choices.size())];
  };

  std::vector<GaIndividual> pop(params.population_size);
  for (GaIndividual& g : pop) {
    g.delays = zero;
    const int span = params.init_delayed_flights_max - params.init_delayed_flights_min + 1;
    const int k = params.init_delayed_flights_min + static_cast<int>(uniform_below(rng, span));
    for (int i = 0; i < k; ++i) {
      const auto f = static_cast<FlightIdx>(sample_index(weights, rng));
      g.delays[f] = std::min(g.delays[f] + pick_step(), params.max_delay);
    }
  }
  evaluate_all(scenario, pop, config.weights);
  update_archive(result.archive, pop);

  auto log_best = [&](int generation) {
    const auto best = std::min_element(result.archive.begin(), result.archive.end(),
                                       [](const GaIndividual& a, const GaIndividual& b) {
                                         return weighted_before(a.objective, b.objective);
                                       });
    if (!weighted_before(best->objective, result.selected.objective)) return;
    RunLogRow row;
    row.step = generation;
    row.delta_j = result.selected.objective.j_total - best->objective.j_total;
    row.cum_delta_j = result.baseline.j_total - best->objective.j_total;
    row.j_cap = best->objective.j_cap;
    row.j_delay = best->objective.j_delay;
    row.descriptor = "gen" + std::to_string(generation);
    row.elapsed_ms = log_timing ? clock.elapsed_ms() : 0.0;
    result.log.rows.push_back(std::move(row));
    result.selected = *best;
  };
  log_best(0);

  for (int gen = 1; gen <= params.generations; ++gen) {
    if (params.max_seconds > 0.0 && clock.elapsed_s() >= params.max_seconds) break;
    const std::vector<Ranked> ranks = rank_population(pop);
    auto tournament = [&]() -> const GaIndividual& {
      const std::size_t a = uniform_below(rng, pop.size());
      const std::size_t b = uniform_below(rng, pop.size());
      return better(ranks[b], ranks[a]) ? pop[b] : pop[a];
    };

    std::vector<GaIndividual> offspring;
    offspring.reserve(pop.size());
    while (offspring.size() < pop.size()) {
      const GaIndividual& pa = tournament();
      const GaIndividual& pb = tournament();
      GaIndividual child{pa.delays, {}};
      if (uniform01(rng) < params.p_crossover) {
        for (FlightIdx f = 0; f < n; ++f) {
          if (rng() & 1U) child.delays[f] = pb.delays[f];
        }
      }
      for (int m = 0; m < params.mutations_per_child; ++m) {
        std::vector<FlightIdx> existing;
        if (uniform01(rng) < params.mutate_existing_prob) {
          for (FlightIdx f = 0; f < n; ++f) {
            if (child.delays[f] > 0) existing.push_back(f);
          }
        }
        const FlightIdx f = existing.empty()
                                ? static_cast<FlightIdx>(sample_index(weights, rng))
                                : existing[uniform_below(rng, existing.size())];
        int step = pick_step();
        if (params.allow_negative_moves && (rng() & 1U)) step = -step;
        child.delays[f] = std::clamp(child.delays[f] + step, 0, params.max_delay);
      }
      offspring.push_back(std::move(child));
    }
    evaluate_all(scenario, offspring, config.weights);
    update_archive(result.archive, offspring);

    std::vector<GaIndividual> merged = std::move(pop);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                  std::make_move_iterator(offspring.end()));
    std::vector<std::vector<std::size_t>> fronts;
    const std::vector<Ranked> merged_ranks = rank_population(merged, &fronts);
    std::vector<GaIndividual> next;
    next.reserve(params.population_size);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= static_cast<std::size_t>(params.population_size)) {
        for (std::size_t i : front) next.push_back(merged[i]);
        continue;
      }
      std::vector<std::size_t> order = front;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return merged_ranks[a].crowding > merged_ranks[b].crowding;
      });
      for (std::size_t i : order) {
        if (next.size() == static_cast<std::size_t>(params.population_size)) break;
        next.push_back(merged[i]);
      }
      break;
    }
    pop = std::move(next);
    log_best(gen);
  }

  std::sort(result.archive.begin(), result.archive.end(),
            [](const GaIndividual& a, const GaIndividual& b) {
              return a.objective.j_cap < b.objective.j_cap;
            });
  return result;
}

GreedyResult run_greedy_capping(const Scenario& scenario, const EngineConfig& config,
                                int max_iterations, bool log_timing) {
  Stopwatch clock;
  Evaluation state = evaluate(scenario, DelayVector(scenario.num_flights()), config.weights);
  std::vector<Regulation> regs;
  std::vector<double> elapsed;
  for (int it = 0; it < max_iterations; ++it) {
    const std::vector<Hotspot> hotspots = detect_hotspots(state.demand);
    if (hotspots.empty()) break;
    const Hotspot* worst = &hotspots.front();
    double worst_sev = severity(*worst, state.demand);
    for (const Hotspot& h : hotspots) {
      const double s = severity(h, state.demand);
      if (s > worst_sev) {
        worst = &h;
        worst_sev = s;
      }
    }
    Regulation reg;
    reg.cv = worst->tv;
    reg.t_start = worst->t_start;
    reg.t_end = worst->t_end;
    reg.rate_per_hour = std::max(1, window_min_capacity(*worst, scenario));
    for (const RegulatedFlight& rf :
         window_flights(scenario, state.delays, worst->tv, worst->t_start, worst->t_end)) {
      reg.members.push_back(rf.flight);
    }
    reg.normalize();
    if (reg.members.empty()) break;
    DelayVector next =
        apply_regulation(scenario, state.delays, reg, config.max_delay_per_flight_min);
    if (next == state.delays) break;
    state = evaluate(scenario, std::move(next), config.weights);
    regs.push_back(std::move(reg));
    elapsed.push_back(log_timing ? clock.elapsed_ms() : 0.0);
  }
  GreedyResult result;
  result.plan = build_plan(scenario, std::move(regs), config);
  result.log = plan_log(scenario, result.plan, "greedy", elapsed);
  return result;
}

}  // namespace rz
