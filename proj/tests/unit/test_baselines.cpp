#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "rz/baselines.hpp"
#include "rz/scenario_io.hpp"

using namespace rz;

TEST_SUITE("baselines") {

TEST_CASE("hot-cell weights give 4:1 odds") {
  const Scenario sc = rz::test::make_scenario({"A"}, {{"F1", {{"A", 600.0}}}, {"F2", {{"A", 900.0}}}});
  DemandGrid d(1, 96);
  for (int t : {38, 39, 40}) d.excess_row(0)[t] = 1;
  const DelayVector zero(2);
  CHECK(hot_cell_weights(sc, zero, d) == std::vector<double>{4.0, 1.0});
  CHECK(hot_cell_weights(sc, zero, DemandGrid(1, 96)) == std::vector<double>{1.0, 1.0});

  std::mt19937_64 rng(3);
  int first = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) first += hot_cell_weighted_flight_pick(sc, zero, d, rng) == 0;
  CHECK(static_cast<double>(first) / n == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("incremental demand tracks full rebuilds") {
  std::mt19937_64 rng(8);
  const Scenario sc = rz::test::random_scenario(rng, 60, 3, 5);
  IncrementalDemand inc(sc, DelayVector(sc.num_flights()), {});
  std::uniform_int_distribution<int> pf(0, static_cast<int>(sc.num_flights()) - 1);
  std::uniform_int_distribution<int> pd(0, 60);
  for (int i = 0; i < 200; ++i) {
    inc.set_delay(static_cast<FlightIdx>(pf(rng)), pd(rng));
  }
  CHECK(inc.demand() == build_demand(sc, inc.delays()));
  CHECK(inc.objective().j_total == rz::test::naive_j(sc, inc.delays()));
}

TEST_CASE("SA is reproducible and reports exact objectives") {
  const Scenario sc = generate_preset("default", 2);
  SaParams p;
  p.iters = 800;
  p.seed = 4;
  const SaResult a = run_sa(sc, p, {}, false);
  const SaResult b = run_sa(sc, p, {}, false);
  CHECK(a.delays == b.delays);
  CHECK(a.log.to_csv(false) == b.log.to_csv(false));
  CHECK(a.objective.j_total == rz::test::naive_j(sc, a.delays));
  CHECK(a.objective.j_total <= a.baseline.j_total);
}

TEST_CASE("Pareto helpers") {
  const auto pt = [](std::int64_t cap, std::int64_t delay) {
    return combine(cap, delay, {});
  };
  CHECK(dominates(pt(1, 1), pt(2, 1)));
  CHECK_FALSE(dominates(pt(1, 1), pt(1, 1)));
  CHECK_FALSE(dominates(pt(1, 3), pt(2, 1)));
  const std::vector<ObjectiveBreakdown> pts = {pt(1, 5), pt(5, 1), pt(3, 3), pt(4, 4)};
  const auto fronts = non_dominated_sort(pts);
  REQUIRE(fronts.size() == 2);
  CHECK(fronts[0].size() == 3);
  CHECK(fronts[1] == std::vector<std::size_t>{3});
  const auto cd = crowding_distance(pts, fronts[0]);
  CHECK(std::isinf(cd[0]));
  CHECK(std::isfinite(cd[2]));
}

TEST_CASE("GA archive is non-dominated and seeded runs repeat") {
  const Scenario sc = generate_preset("default", 2);
  GaParams p;
  p.population_size = 16;
  p.generations = 5;
  p.seed = 6;
  const GaResult a = run_nsga2(sc, p, {}, false);
  const GaResult b = run_nsga2(sc, p, {}, false);
  CHECK(a.selected.delays == b.selected.delays);
  for (const auto& x : a.archive) {
    for (const auto& y : a.archive) CHECK_FALSE(dominates(x.objective, y.objective));
    CHECK(x.objective.j_total == rz::test::naive_j(sc, x.delays));
  }
  for (const auto& x : a.archive) CHECK(a.selected.objective.j_total <= x.objective.j_total);

  p.generations = 0;
  const GaResult init = run_nsga2(sc, p, {}, false);
  CHECK_FALSE(init.archive.empty());
}

TEST_CASE("greedy capping resolves an isolated hotspot") {
  // Seven entries 9 minutes apart overload one rolling hour by a single flight.
  std::vector<rz::test::FlightSpec> specs;
  for (int i = 0; i < 7; ++i) specs.push_back({"F" + std::to_string(i), {{"A", 600.0 + 9 * i}}});
  const Scenario sc = rz::test::make_scenario({"A"}, specs, 6);
  EngineConfig cfg;
  cfg.weights.w_cap = 50.0;  // metering costs 21 minutes; one excess unit must outweigh it
  const GreedyResult g = run_greedy_capping(sc, cfg, 200, false);
  CHECK(g.plan.total_delta_j() == 50.0 - 21.0);
  CHECK(objective(sc, g.plan.delays).j_cap == 0);
  CHECK(g.plan.total_delta_j() == rz::test::naive_j(sc, DelayVector(sc.num_flights()), cfg.weights) -
                                      rz::test::naive_j(sc, g.plan.delays, cfg.weights));
}

TEST_CASE("greedy capping goes negative on the cascade preset") {
  const Scenario sc = generate_preset("cascade");
  const GreedyResult g = run_greedy_capping(sc, {}, 200, false);
  CHECK(g.plan.total_delta_j() < 0.0);
}

TEST_CASE("zero-overload scenario leaves greedy empty") {
  const Scenario sc = rz::test::make_scenario({"A"}, {{"F1", {{"A", 600.0}}}});
  CHECK(run_greedy_capping(sc).plan.regulations.empty());
}

}
