#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "rz/mcts.hpp"
#include "rz/runlog.hpp"
#include "rz/scenario_io.hpp"

using namespace rz;

namespace {

Scenario read(const std::string& flights, const std::string& caps) {
  std::istringstream f(flights);
  std::istringstream c(caps);
  return read_scenario(f, c);
}

std::string flat_caps(const std::string& tv, int cap) {
  std::string out = "tv_id,hour,capacity\n";
  for (int h = 0; h < 24; ++h) out += tv + "," + std::to_string(h) + "," + std::to_string(cap) + "\n";
  return out;
}

}  // namespace

TEST_SUITE("scenario-io") {

TEST_CASE("minute formatting") {
  CHECK(format_minutes(to_ticks(481.5)) == "481.5");
  CHECK(format_minutes(to_ticks(480.0)) == "480");
  CHECK(parse_minutes("494.9") == 4949);
  CHECK_THROWS(parse_minutes("abc"));
  CHECK_THROWS(parse_minutes(""));
}

TEST_CASE("scenario CSV round trip") {
  const Scenario sc = generate_preset("default", 4);
  std::ostringstream f, c;
  write_flights_csv(f, sc);
  write_capacities_csv(c, sc);
  CHECK(read(f.str(), c.str()) == sc);
}

TEST_CASE("empty flight file is a valid empty scenario") {
  const Scenario sc = read("flight_id,seq,tv_id,entry_min\n", flat_caps("A", 10));
  CHECK(sc.num_flights() == 0);
  CHECK(detect_hotspots(build_demand(sc, DelayVector(0))).empty());
}

TEST_CASE("invalid inputs are rejected") {
  const std::string header = "flight_id,seq,tv_id,entry_min\n";
  CHECK_THROWS_AS(read(header + "F1,0,A,1440\n", flat_caps("A", 10)), ValidationError);
  CHECK_THROWS_AS(read(header + "F1,0,B,600\n", flat_caps("A", 10)), ValidationError);
  CHECK_THROWS_AS(read(header + "F1,0,A,600\nF1,1,B,590\n",
                       flat_caps("A", 10) + flat_caps("B", 10).substr(20)),
                  ValidationError);
  CHECK_THROWS_AS(read(header + "F1,0,A,600\nF1,1,A,610\n", flat_caps("A", 10)), ValidationError);
  CHECK_THROWS_AS(read("bogus\n", flat_caps("A", 10)), ValidationError);
  CHECK_THROWS_AS(read(header + "F1,0,A,six\n", flat_caps("A", 10)), ValidationError);
  try {
    read(header + "F1,0,A,600\nF2,0,A,2000\n", flat_caps("A", 10));
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("flights.csv:3") != std::string::npos);
  }
}

TEST_CASE("per-bin capacity form") {
  std::string caps = "tv_id,bin,capacity\n";
  for (int b = 0; b < 96; ++b) caps += "A," + std::to_string(b) + "," + std::to_string(b % 7) + "\n";
  const Scenario sc = read("flight_id,seq,tv_id,entry_min\nF1,0,A,600\n", caps);
  CHECK(sc.capacities().at(0, 13) == 6);
  CHECK_THROWS_AS(read("flight_id,seq,tv_id,entry_min\n", "tv_id,bin,capacity\nA,0,5\n"), ValidationError);
}

TEST_CASE("generator is seeded") {
  GeneratorParams p;
  p.num_flights = 120;
  p.seed = 17;
  CHECK(generate(p) == generate(p));
  p.seed = 18;
  const Scenario other = generate(p);
  p.seed = 17;
  CHECK_FALSE(generate(p) == other);
  CHECK_THROWS_AS(generate_preset("nope"), ValidationError);
  for (const std::string& name : preset_names()) CHECK_NOTHROW(generate_preset(name));
}

TEST_CASE("plan JSON round trip") {
  const Scenario sc = generate_preset("default", 1);
  SearchParams sp;
  sp.sims = 16;
  sp.depth = 4;
  const SearchResult r = run_search(sc, sp, EngineConfig{}, nullptr, false);
  const PlanDocument doc = to_document(r.plan, "rz");
  const std::string text = plan_to_json(sc, doc);
  const PlanDocument back = plan_from_json(sc, text);
  CHECK(back.regulations == doc.regulations);
  CHECK(back.delta_j == doc.delta_j);
  CHECK(back.algorithm == "rz");
  CHECK(plan_to_json(sc, back) == text);

  const PlanDocument empty = plan_from_json(sc, plan_to_json(sc, PlanDocument{}));
  CHECK(empty.regulations.empty());

  auto j = nlohmann::json::parse(text);
  j["schema_version"] = 99;
  CHECK_THROWS_AS(plan_from_json(sc, j.dump()), ValidationError);
}

TEST_CASE("RunLog CSV round trip") {
  RunLog log;
  log.algorithm = "rz";
  log.rows.push_back({1, 12.5, 12.5, 40, 30, "TV01[40-43]r12n5", 3.25});
  log.rows.push_back({2, -1.0, 11.5, 39, 41, "TV02[50-50]r6n2", 7.5});
  std::istringstream in(log.to_csv());
  const RunLog back = RunLog::read_csv(in);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].descriptor == "TV02[50-50]r6n2");
  CHECK(back.rows[1].elapsed_ms == 7.5);
  CHECK(back.to_csv() == log.to_csv());
  CHECK(log.to_csv(false).find("3.25") == std::string::npos);

  RunLog whole;
  whole.rows.push_back({1, -340.0, -340.0, 91, 1110, "", 0.0});
  CHECK(whole.to_csv().find("\n1,-340,-340,91,1110,,0\n") != std::string::npos);
}

}
