#include <doctest.h>

#include "rz/heuristics.hpp"

using namespace rz;

namespace {

Flow flow_with_window(int lo, int hi) {
  Flow f;
  TouchedWindow w;
  w.tv = 0;
  w.lo = lo;
  w.hi = hi;
  w.attributed_entries.assign(96, 0);
  w.attributed_demand.assign(96, 0);
  f.windows.push_back(w);
  f.footprint = {0};
  return f;
}

}  // namespace

TEST_SUITE("heuristics") {

TEST_CASE("hot cells are overloaded bins inside the touched window") {
  DemandGrid d(1, 96);
  CapacityProfile cap(1, 96, 10);
  Flow f = flow_with_window(10, 12);
  CHECK(hot_cells(f, d, cap).empty());
  d.demand_row(0)[11] = 12;
  d.demand_row(0)[20] = 15;  // outside the window
  const auto cells = hot_cells(f, d, cap);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0] == HotCell{0, 11});
}

TEST_CASE("NomRel sums flow demand at hot cells") {
  DemandGrid d(1, 96);
  CapacityProfile cap(1, 96, 10);
  Flow f = flow_with_window(10, 12);
  CHECK(nomrel(f, d, cap) == 0);
  d.demand_row(0)[10] = 11;
  d.demand_row(0)[12] = 10;
  f.windows[0].attributed_demand[10] = 3;
  f.windows[0].attributed_demand[12] = 2;
  f.windows[0].attributed_demand[11] = 9;  // not hot
  CHECK(nomrel(f, d, cap) == 5);
}

TEST_CASE("NomRel of all traffic at a cell is its demand") {
  DemandGrid d(1, 96);
  CapacityProfile cap(1, 96, 30);
  Flow f = flow_with_window(10, 10);
  d.demand_row(0)[10] = 35;
  f.windows[0].attributed_demand[10] = 35;
  CHECK(nomrel(f, d, cap) == 35);
}

TEST_CASE("InLoad hand evaluations") {
  // Four overflow bins after the window carry demand 40 in total.
  DemandGrid d(1, 96);
  for (int t = 13; t <= 16; ++t) d.demand_row(0)[t] = 10;
  Flow f = flow_with_window(10, 12);
  f.windows[0].attributed_demand[11] = 6;

  CapacityProfile slack(1, 96, 12);  // 48 over the overflow bins
  InLoadParts p = inload_parts(f, d, slack);
  CHECK(p.before == 0);
  CHECK(p.after == 0);
  CHECK(p.value() == 0);

  CapacityProfile tight(1, 96, 9);  // 36 over the overflow bins
  p = inload_parts(f, d, tight);
  CHECK(p.before == 4);
  CHECK(p.after == 10);
  CHECK(inload(f, d, tight) == -6);

  Flow empty = flow_with_window(10, 12);
  CHECK(inload(empty, d, tight) == 0);
}

TEST_CASE("priority band and tie-break") {
  CHECK(nomrel_band(0) == 0.0);
  CHECK(nomrel_band(10) == 10.0);
  CHECK(nomrel_band(40) == 25.0);
  CHECK(nomrel_band(70) == 20.0);
  CHECK(nomrel_band(1000) == 1.0);
  CHECK(priority(40, -6, 5) == 22.0);
  CHECK(priority(40, 3, 5) == 25.0);

  const FlowScore s{10, 0, 10.0};
  CHECK(ranks_before(s, 1, s, 2));
  CHECK_FALSE(ranks_before(s, 2, s, 1));
  const FlowScore zero{0, 0, 0.0};
  CHECK(ranks_before(FlowScore{1, -100, -49.0}, 5, zero, 0));
}

TEST_CASE("rank_flows orders by priority then id") {
  std::vector<Flow> flows(3);
  for (int i = 0; i < 3; ++i) flows[i].id = i;
  const std::vector<FlowScore> scores = {{5, 0, 5.0}, {20, 0, 20.0}, {5, 0, 5.0}};
  CHECK(rank_flows(flows, scores) == std::vector<std::size_t>{1, 0, 2});
}

}
