#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rz/fpfs.hpp"
#include "rz/runlog.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

struct SaParams {
  int iters = 10000;
  double t0 = 15.0;
  double cooling = 0.999;
  double t_min = 1e-9;
  int max_delay = 120;
  std::vector<int> step_choices = {2, 3, 4, 5};
  std::uint64_t seed = 0;
  /// Wall-clock cap; the best state so far is returned. 0 disables it.
  double max_seconds = 0.0;

  void validate() const;
};

struct GaParams {
  int population_size = 64;
  int generations = 80;
  double p_crossover = 0.9;
  int mutations_per_child = 2;
  double mutate_existing_prob = 0.7;
  std::vector<int> step_choices = {2, 3, 4, 5};
  bool allow_negative_moves = true;
  int init_delayed_flights_min = 1;
  int init_delayed_flights_max = 8;
  int max_delay = 120;
  std::uint64_t seed = 0;
  /// Wall-clock cap; the archive so far is returned. 0 disables it.
  double max_seconds = 0.0;

  void validate() const;
};

/// Per-flight pick weight: 1 + number of overloaded (volume, window-start)
/// cells whose rolling-hour demand the flight's shifted entries feed.
std::vector<double> hot_cell_weights(const Scenario& scenario, const DelayVector& delays,
                                     const DemandGrid& demand);

FlightIdx hot_cell_weighted_flight_pick(const Scenario& scenario, const DelayVector& delays,
                                        const DemandGrid& demand, std::mt19937_64& rng);

/// Demand grid kept in step with single-flight delay edits.
class IncrementalDemand {
 public:
  IncrementalDemand(const Scenario& scenario, DelayVector delays, ObjectiveWeights weights);

  void set_delay(FlightIdx f, int minutes);
  const DelayVector& delays() const { return delays_; }
  const DemandGrid& demand() const { return demand_; }
  ObjectiveBreakdown objective() const { return combine(j_cap_, delays_.total(), weights_); }

 private:
  void shift_entries(FlightIdx f, int delay, int sign);
  void reroll(VolumeIdx v);

  const Scenario* scenario_;
  ObjectiveWeights weights_;
  DelayVector delays_;
  DemandGrid demand_;
  std::int64_t j_cap_ = 0;
};

struct SaResult {
  DelayVector delays;
  ObjectiveBreakdown objective;
  ObjectiveBreakdown baseline;
  std::int64_t accepted = 0;
  RunLog log;
};

SaResult run_sa(const Scenario& scenario, const SaParams& params, const EngineConfig& config = {},
                bool log_timing = true);

struct GaIndividual {
  DelayVector delays;
  ObjectiveBreakdown objective;
};

/// True when `a` is no worse on both (j_cap, j_delay) and better on one.
bool dominates(const ObjectiveBreakdown& a, const ObjectiveBreakdown& b);

/// Pareto front indices (front 0 first) of bi-objective points.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveBreakdown>& pts);

/// Crowding distance of each member of one front; boundary points get infinity.
std::vector<double> crowding_distance(const std::vector<ObjectiveBreakdown>& pts,
                                      const std::vector<std::size_t>& front);

struct GaResult {
  std::vector<GaIndividual> archive;  // mutually non-dominated, distinct objective points
  GaIndividual selected;              // archive member with the lowest weighted J
  ObjectiveBreakdown baseline;
  RunLog log;
};

GaResult run_nsga2(const Scenario& scenario, const GaParams& params, const EngineConfig& config = {},
                   bool log_timing = true);

struct GreedyResult {
  Plan plan;
  RunLog log;
};

/// Blanket capping at the window-minimum capacity, worst hotspot first.
GreedyResult run_greedy_capping(const Scenario& scenario, const EngineConfig& config = {},
                                int max_iterations = 200, bool log_timing = true);

}  // namespace rz
