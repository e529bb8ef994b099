#include <doctest.h>

#include "fixtures.hpp"
#include "rz/fpfs.hpp"

using namespace rz;
using rz::test::make_scenario;

namespace {

Regulation reg_at(VolumeIdx cv, int t_start, int t_end, int rate, std::vector<FlightIdx> members) {
  Regulation r;
  r.cv = cv;
  r.t_start = t_start;
  r.t_end = t_end;
  r.rate_per_hour = rate;
  r.members = std::move(members);
  return r;
}

}  // namespace

TEST_SUITE("fpfs-allocator") {

TEST_CASE("hand-derived allocation at rate 4") {
  const Regulation r = reg_at(0, 32, 33, 4, {0, 1, 2});
  const std::vector<RegulatedFlight> flights = {
      {0, to_ticks(481.0)}, {1, to_ticks(483.0)}, {2, to_ticks(484.0)}};
  const auto slots = allocate(r, flights, TimeGrid{}, 120);
  REQUIRE(slots.size() == 3);
  CHECK(slots[0].delay_min == 14);
  CHECK(slots[1].delay_min == 27);
  CHECK(slots[2].delay_min == 41);
  CHECK(slots[0].slot_min == 495.0);
  CHECK(slots[2].slot_min == 525.0);
}

TEST_CASE("entry at the anchor waits nothing") {
  const Regulation r = reg_at(0, 32, 32, 4, {0});
  const std::vector<RegulatedFlight> flights = {{0, to_ticks(480.0)}};
  CHECK(allocate(r, flights, TimeGrid{}, 120)[0].delay_min == 0);
}

TEST_CASE("rate 60 with sparse entries delays nobody") {
  const Regulation r = reg_at(0, 32, 35, 60, {0, 1, 2});
  const std::vector<RegulatedFlight> flights = {
      {0, to_ticks(481.0)}, {1, to_ticks(483.0)}, {2, to_ticks(490.0)}};
  for (const auto& a : allocate(r, flights, TimeGrid{}, 120)) CHECK(a.delay_min == 0);
}

TEST_CASE("zero rate is a domain error") {
  const Regulation r = reg_at(0, 32, 32, 0, {});
  CHECK_THROWS_AS(allocate(r, {}, TimeGrid{}, 120), DomainError);
}

TEST_CASE("delays clamp at the cap") {
  const Regulation r = reg_at(0, 32, 32, 1, {0, 1, 2});
  const std::vector<RegulatedFlight> flights = {
      {0, to_ticks(481.0)}, {1, to_ticks(482.0)}, {2, to_ticks(483.0)}};
  const auto slots = allocate(r, flights, TimeGrid{}, 120);
  CHECK(slots[2].delay_min == 120);
  CHECK(slots[2].clamped);
  CHECK_FALSE(slots[0].clamped);
}

TEST_CASE("effective window adds three trailing bins") {
  const auto [lo, hi] = effective_window(38, 40, TimeGrid{});
  CHECK(lo == 38);
  CHECK(hi == 43);
  CHECK(effective_window(94, 95, TimeGrid{}).second == 95);

  const Scenario sc = make_scenario(
      {"A"}, {{"F1", {{"A", 615.0}}}, {"F2", {{"A", 659.0}}}, {"F3", {{"A", 660.0}}}});
  const Regulation r = reg_at(0, 38, 40, 10, {0, 1, 2});
  const auto rf = regulated_flights(sc, DelayVector(3), r);
  REQUIRE(rf.size() == 2);
  CHECK(rf[1].flight == sc.flight_index("F2"));
}

TEST_CASE("regulated flights: empty members and same-minute ties") {
  const Scenario sc = make_scenario({"A"}, {{"B2", {{"A", 600.0}}}, {"A1", {{"A", 600.0}}}});
  CHECK(regulated_flights(sc, DelayVector(2), reg_at(0, 40, 40, 4, {})).empty());
  const auto rf = regulated_flights(sc, DelayVector(2), reg_at(0, 40, 40, 4, {0, 1}));
  REQUIRE(rf.size() == 2);
  CHECK(sc.flight(rf[0].flight).id == "A1");
  CHECK(sc.flight(rf[1].flight).id == "B2");
}

TEST_CASE("unknown control volume is rejected") {
  const Scenario sc = make_scenario({"A"}, {{"F1", {{"A", 600.0}}}});
  CHECK_THROWS_AS(reg_at(3, 40, 40, 4, {0}).validate(sc), DomainError);
  CHECK_THROWS_AS(reg_at(0, 41, 40, 4, {0}).validate(sc), ValidationError);
}

TEST_CASE("sequential composition adds stage delays") {
  const auto fx = rz::test::mpr_fixture();
  CHECK(compose_sequential(fx.scenario, {}, 120) == DelayVector(1));
  const DelayVector one = compose_sequential(fx.scenario, std::span(fx.regulations).first(1), 120);
  CHECK(one[fx.x] == 10);
  CHECK(compose_mpr(fx.scenario, std::span(fx.regulations).first(1), 120) == one);
  CHECK(compose_sequential(fx.scenario, fx.regulations, 120)[fx.x] == 17);
}

TEST_CASE("MPR keeps the largest stage delay") {
  const auto fx = rz::test::mpr_fixture();
  const DelayVector mpr = compose_mpr(fx.scenario, fx.regulations, 120);
  const DelayVector seq = compose_sequential(fx.scenario, fx.regulations, 120);
  CHECK(mpr[fx.x] == 10);
  CHECK(seq[fx.x] == 17);
  CHECK(build_demand(fx.scenario, mpr) != build_demand(fx.scenario, seq));
}

TEST_CASE("disjoint member sets compose identically") {
  const Scenario sc = make_scenario(
      {"A", "B"}, {{"F1", {{"A", 601.0}}}, {"F2", {{"A", 602.0}}}, {"F3", {{"B", 700.0}}}, {"F4", {{"B", 701.0}}}});
  const std::vector<Regulation> regs = {reg_at(0, 40, 40, 4, {0, 1}), reg_at(1, 46, 46, 4, {2, 3})};
  CHECK(compose_mpr(sc, regs, 120) == compose_sequential(sc, regs, 120));
}

TEST_CASE("build_plan logs each step") {
  const auto fx = rz::test::mpr_fixture();
  const Plan plan = build_plan(fx.scenario, fx.regulations, EngineConfig{});
  REQUIRE(plan.delta_j.size() == 2);
  CHECK(plan.delta_j[0] == -10.0);
  CHECK(plan.delta_j[1] == -7.0);
  CHECK(plan.total_delta_j() == -17.0);
  CHECK(plan.final_objective().j_delay == 17);
}

}
