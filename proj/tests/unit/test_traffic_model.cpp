#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "rz/traffic_model.hpp"

using namespace rz;
using rz::test::make_scenario;

TEST_SUITE("traffic-model") {

TEST_CASE("bin_of floors to 15-minute bins") {
  const TimeGrid g;
  CHECK(bin_of(0.0, g) == 0);
  CHECK(bin_of(480.0, g) == 32);
  CHECK(bin_of(494.9, g) == 32);
  CHECK(bin_of(1439.9, g) == 95);
  CHECK_THROWS_AS(bin_of(1440.0, g), DomainError);
  CHECK_THROWS_AS(bin_of(-0.1, g), DomainError);
}

TEST_CASE("rolling demand sums four bins") {
  std::vector<int> e(96, 0);
  e[0] = 2;
  e[1] = 1;
  e[3] = 3;
  std::vector<int> cap(96, 5);
  std::vector<int> d(96), g(96);
  roll_demand_row(e, cap, 4, d, g);
  CHECK(d[0] == 6);
  CHECK(g[0] == 1);
  CHECK(d[1] == 4);
  CHECK(d[3] == 3);
  CHECK(d[4] == 0);
}

TEST_CASE("a delay moves an entry to the next bin") {
  const Scenario sc = make_scenario({"A"}, {{"F1", {{"A", 479.0}}}});
  DelayVector delays(1);
  CHECK(build_demand(sc, delays).entries(0, 31) == 1);
  delays[0] = 2;
  const DemandGrid d = build_demand(sc, delays);
  CHECK(d.entries(0, 31) == 0);
  CHECK(d.entries(0, 32) == 1);
}

TEST_CASE("entries pushed past midnight leave the grid") {
  const Scenario sc = make_scenario({"A"}, {{"F1", {{"A", 1435.0}}}});
  DelayVector delays(1);
  delays[0] = 10;
  CHECK(build_demand(sc, delays).entries_row(0)[95] == 0);
}

TEST_CASE("build_demand agrees with the naive count and the serial reference") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario sc = rz::test::random_scenario(rng, 80, 4, 6);
    DelayVector delays(sc.num_flights());
    std::uniform_int_distribution<int> pick(0, 40);
    for (FlightIdx f = 0; f < sc.num_flights(); ++f) delays[f] = pick(rng);
    const DemandGrid fast = build_demand(sc, delays);
    CHECK(fast == rz::test::naive_demand(sc, delays));
    CHECK(fast == reference::build_demand(sc, delays));
  }
}

TEST_CASE("hotspots are maximal runs of positive excess") {
  DemandGrid d(1, 96);
  CHECK(detect_hotspots(d).empty());
  auto g = d.excess_row(0);
  g[2] = 3;
  g[3] = 4;
  g[5] = 2;
  const auto hs = detect_hotspots(d);
  REQUIRE(hs.size() == 2);
  CHECK(hs[0] == Hotspot{0, 2, 3});
  CHECK(hs[1] == Hotspot{0, 5, 5});

  DemandGrid all(1, 96);
  for (int& x : all.excess_row(0)) x = 1;
  const auto one = detect_hotspots(all);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Hotspot{0, 0, 95});
}

TEST_CASE("objective combines capacity and delay terms") {
  const ObjectiveBreakdown j = combine(5, 30, {10.0, 1.0});
  CHECK(j.j_total == 80.0);
  const Scenario empty = make_scenario({"A"}, {});
  const ObjectiveBreakdown zero = objective(empty, DelayVector(0));
  CHECK(zero.j_cap == 0);
  CHECK(zero.j_delay == 0);
  CHECK(zero.j_total == 0.0);
}

TEST_CASE("objective matches the naive recomputation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario sc = rz::test::random_scenario(rng, 60, 3, 5);
    DelayVector delays(sc.num_flights());
    std::uniform_int_distribution<int> pick(0, 30);
    for (FlightIdx f = 0; f < sc.num_flights(); ++f) delays[f] = pick(rng);
    CHECK(objective(sc, delays).j_total == rz::test::naive_j(sc, delays));
  }
}

TEST_CASE("scenario rejects bad input") {
  CHECK_THROWS_AS(make_scenario({"A"}, {{"F1", {{"A", 500.0}}}, {"F1", {{"A", 510.0}}}}),
                  ValidationError);
  CHECK_THROWS_AS(make_scenario({"A", "A"}, {}), ValidationError);
  CHECK_THROWS_AS(make_scenario({"A"}, {{"F1", {}}}), ValidationError);
}

TEST_CASE("flights are indexed in identifier order") {
  const Scenario sc = make_scenario({"A", "B"}, {{"Z9", {{"B", 600.0}}}, {"A1", {{"A", 500.0}, {"B", 520.0}}}});
  CHECK(sc.flight_index("A1") == 0);
  CHECK(sc.flight_index("Z9") == 1);
  CHECK(sc.footprint(0).size() == 2);
  CHECK_THROWS_AS(sc.flight_index("nope"), DomainError);
}

TEST_CASE("delay vector validation") {
  DelayVector d(2);
  d[0] = 121;
  CHECK_THROWS_AS(d.validate(2, 120), ValidationError);
  d[0] = -1;
  CHECK_THROWS_AS(d.validate(2, 120), ValidationError);
  d[0] = 5;
  CHECK_NOTHROW(d.validate(2, 120));
  CHECK(d.total() == 5);
  CHECK(d.count_delayed() == 1);
}

}
