#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "fixtures.hpp"
#include "rz/metrics.hpp"

using namespace rz;

TEST_SUITE("metrics-report") {

TEST_CASE("cell diff cases") {
  CapacityProfile cap(1, 96, 30);
  DemandGrid before(1, 96);
  CHECK(cell_diff(before, before, cap) == CellDiff{});

  before.demand_row(0)[5] = 35;
  before.demand_row(0)[6] = 10;
  DemandGrid after = before;
  after.demand_row(0)[5] = 30;
  after.demand_row(0)[6] = 12;
  const CellDiff d = cell_diff(before, after, cap);
  CHECK(d.changed_cells == 2);
  CHECK(d.changed_tvs == 1);
  CHECK(d.overcap_reductions == 1);
  CHECK(d.undercap_increases == 1);
  CHECK(d.beneficial_pairs == 2);

  CHECK_THROWS_AS(cell_diff(before, DemandGrid(2, 96), cap), ValidationError);
}

TEST_CASE("overcap reductions and undercap increases never share a cell") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> val(0, 40);
  CapacityProfile cap(3, 96, 20);
  for (int trial = 0; trial < 50; ++trial) {
    DemandGrid a(3, 96), b(3, 96);
    for (VolumeIdx v = 0; v < 3; ++v) {
      for (int t = 0; t < 96; ++t) {
        a.demand_row(v)[t] = val(rng);
        b.demand_row(v)[t] = val(rng);
      }
    }
    const CellDiff d = cell_diff(a, b, cap);
    CHECK(d.overcap_reductions + d.undercap_increases <= d.changed_cells);
  }
}

TEST_CASE("Gini analytic cases") {
  CHECK(gini(std::vector<double>{}) == 0.0);
  CHECK(gini(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(gini(std::vector<double>{5, 5, 5, 5}) == 0.0);
  CHECK(gini(std::vector<double>{12, 0, 0, 0}) == 0.75);
}

TEST_CASE("tv Gini on zero delays is zero") {
  const Scenario sc = rz::test::make_scenario({"A", "B"}, {{"F1", {{"A", 600.0}, {"B", 620.0}}}});
  CHECK(tv_gini(sc, DelayVector(1)) == 0.0);
  DelayVector d(1);
  d[0] = 10;
  // One flight crossing both volumes: equal exposure under the full basis.
  CHECK(tv_gini(sc, d, ExposureBasis::Full) == 0.0);
  const auto exp = tv_exposure(sc, d, ExposureBasis::Full);
  CHECK(exp == std::vector<double>{10.0, 10.0});
}

TEST_CASE("summarize arithmetic") {
  // 25 flights in the last bin at zero capacity carry 4 excess units each.
  std::vector<rz::test::FlightSpec> specs;
  for (int i = 0; i < 25; ++i) specs.push_back({"F" + std::to_string(10 + i), {{"A", 1430.0}}});
  const Scenario sc = rz::test::make_scenario({"A"}, specs, 0);
  DelayVector after(sc.num_flights());
  for (FlightIdx f = 0; f < 10; ++f) after[f] = 20;  // pushed past midnight
  const ReportRecord r = summarize(sc, DelayVector(sc.num_flights()), after);
  CHECK(r.before.j_cap == 100);
  CHECK(r.after.j_cap == 60);
  CHECK(r.exceedance_reduced == 40);
  CHECK(r.total_delay_min == 200);
  CHECK(r.flights_delayed == 10);
  REQUIRE(r.delay_per_exceedance);
  CHECK(*r.delay_per_exceedance == 5.0);
  CHECK(r.delta_j == r.before.j_total - r.after.j_total);

  const ReportRecord noop = summarize(sc, DelayVector(sc.num_flights()), DelayVector(sc.num_flights()));
  CHECK(noop.delta_j == 0.0);
  CHECK(noop.exceedance_reduced == 0);
  CHECK(noop.flights_delayed == 0);
  CHECK_FALSE(noop.delay_per_exceedance);
  CHECK(noop.cells == CellDiff{});
}

TEST_CASE("report serializations") {
  const Scenario sc = rz::test::make_scenario({"A"}, {{"F1", {{"A", 600.0}}}});
  ReportRecord r = summarize(sc, DelayVector(1), DelayVector(1));
  r.algorithm = "rz";
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["algorithm"] == "rz");
  CHECK(j["delay_per_exceedance"].is_null());
  const std::string header = ReportRecord::csv_header();
  const std::string row = r.to_csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

}
