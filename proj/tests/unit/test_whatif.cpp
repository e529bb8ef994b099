#include <doctest.h>

#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rz/scenario_io.hpp"
#include "rz/whatif.hpp"

using namespace rz;
using nlohmann::json;

namespace {

std::shared_ptr<const Scenario> preset(const std::string& name, std::uint64_t seed = 0) {
  return std::make_shared<const Scenario>(generate_preset(name, seed));
}

json first_regulation(const WhatIfSession& s) {
  const json hs = s.hotspots()["hotspots"];
  REQUIRE_FALSE(hs.empty());
  return {{"regulation",
           {{"tv_id", hs[0]["tv_id"]},
            {"t_start", hs[0]["t_start"]},
            {"t_end", hs[0]["t_end"]},
            {"rate_per_hour", 8}}}};
}

}  // namespace

TEST_SUITE("whatif-service") {

TEST_CASE("evaluate is a dry run and matches commit") {
  WhatIfSession s("s", preset("default", 2));
  const json body = first_regulation(s);
  const auto hash0 = s.state_hash();
  const json ev = s.evaluate(body);
  CHECK(s.state_hash() == hash0);
  CHECK(s.snapshot()->version == 0);
  const json c = s.commit(body);
  CHECK(c["step_delta_j"].get<double>() == ev["delta_j"].get<double>());
  CHECK(c["version"] == 1);
  CHECK(ev["delta_j"].get<double>() ==
        ev["before"]["j_total"].get<double>() - ev["after"]["j_total"].get<double>());
}

TEST_CASE("commit then undo restores the state hash and hotspot board") {
  WhatIfSession s("s", preset("default", 2));
  const auto hash0 = s.state_hash();
  const json board0 = s.hotspots()["hotspots"];
  json plan0 = s.plan();
  s.commit(first_regulation(s));
  CHECK(s.state_hash() != hash0);
  const json u = s.undo({});
  CHECK(s.state_hash() == hash0);
  CHECK(s.hotspots()["hotspots"] == board0);
  CHECK(u["version"] == 2);
  json plan1 = s.plan();
  plan1.erase("version");
  plan0.erase("version");
  CHECK(plan1 == plan0);
  CHECK_THROWS_AS(s.undo({}), ApiError);
}

TEST_CASE("stale expected_version is a conflict") {
  WhatIfSession s("s", preset("default", 2));
  json body = first_regulation(s);
  body["expected_version"] = 3;
  try {
    s.commit(body);
    FAIL("expected a conflict");
  } catch (const ApiError& e) {
    CHECK(e.status() == 409);
    CHECK(e.code() == "version_conflict");
  }
  body["expected_version"] = 0;
  CHECK_NOTHROW(s.commit(body));
}

TEST_CASE("malformed regulations are bad requests") {
  WhatIfSession s("s", preset("default", 2));
  const json bad = {{"regulation", {{"tv_id", "nope"}, {"t_start", 1}, {"t_end", 2}, {"rate_per_hour", 3}}}};
  CHECK_THROWS_AS(s.evaluate(bad), ApiError);
  const json missing = {{"regulation", {{"tv_id", "TV00"}}}};
  CHECK_THROWS_AS(s.evaluate(missing), ApiError);
}

TEST_CASE("suggest with one simulation returns the max-prior proposal") {
  auto sc = preset("bandit");
  WhatIfSession s("s", sc);
  const json out = s.suggest({{"sims", 1}});
  REQUIRE(out["suggestions"].size() == 1);
  const json& top = out["suggestions"][0];

  const EngineConfig cfg;
  const SearchParams sp;
  const Evaluation ev = evaluate(*sc, DelayVector(sc->num_flights()), cfg.weights);
  for (const Hotspot& h : detect_hotspots(ev.demand)) {
    if (hotspot_id(*sc, h) != top["hotspot_id"]) continue;
    std::vector<double> dj;
    for (const Proposal& p : propose(h, *sc, ev, sp.proposals, cfg)) dj.push_back(p.delta_j);
    const auto prior = softmax(dj, sp.tau_proposal);
    CHECK(top["prior"].get<double>() == doctest::Approx(*std::max_element(prior.begin(), prior.end())));
    CHECK(top["delta_j"].get<double>() == *std::max_element(dj.begin(), dj.end()));
  }
}

TEST_CASE("occupancy and flows") {
  WhatIfSession s("s", preset("two-flow"));
  const json hs = s.hotspots()["hotspots"];
  REQUIRE_FALSE(hs.empty());
  const json occ = s.occupancy(hs[0]["tv_id"]);
  CHECK(occ["demand_before"].size() == 96);
  CHECK(occ["demand_before"] == occ["demand_after"]);
  const json fl = s.flows(hs[0]["id"]);
  CHECK(fl["flows"].size() == 2);
  CHECK_THROWS_AS(s.occupancy("nope"), ApiError);
  CHECK_THROWS_AS(s.flows("nope:1-2"), ApiError);
}

TEST_CASE("service routing and errors") {
  WhatIfService svc;
  svc.add_session(preset("default", 2), "a");
  svc.add_session(preset("two-flow"));
  CHECK(svc.default_session() == "a");
  CHECK(svc.session_ids().size() == 2);

  auto [st, body] = svc.handle("GET", "/api/hotspots", "", "");
  CHECK(st == 200);
  CHECK(body.contains("hotspots"));
  std::tie(st, body) = svc.handle("GET", "/api/hotspots", "zzz", "");
  CHECK(st == 404);
  CHECK(body["error"]["code"] == "unknown_session");
  std::tie(st, body) = svc.handle("GET", "/api/nowhere", "", "");
  CHECK(st == 404);
  std::tie(st, body) = svc.handle("POST", "/api/plan/commit", "", "{not json");
  CHECK(st == 400);
  std::tie(st, body) = svc.handle("POST", "/api/plan/undo", "", "");
  CHECK(st == 409);
}

TEST_CASE("search slot admits one search at a time") {
  WhatIfService svc;
  const int outer = svc.with_search_slot([&] {
    CHECK_THROWS_AS(svc.with_search_slot([] { return 0; }), ApiError);
    return 1;
  });
  CHECK(outer == 1);
  CHECK(svc.with_search_slot([] { return 2; }) == 2);
}

TEST_CASE("HTTP round trip") {
  WhatIfService svc;
  svc.add_session(preset("default", 2));
  std::promise<int> bound;
  std::thread server([&] {
    ServerOptions opt;
    opt.port = 0;
    serve(svc, opt, [&](int port) { bound.set_value(port); });
  });
  const int port = bound.get_future().get();
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Get("/api/hotspots");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const json hs = json::parse(res->body)["hotspots"];
  REQUIRE_FALSE(hs.empty());
  const json body = {{"regulation",
                      {{"tv_id", hs[0]["tv_id"]},
                       {"t_start", hs[0]["t_start"]},
                       {"t_end", hs[0]["t_end"]},
                       {"rate_per_hour", 8}}},
                     {"expected_version", 0}};
  auto ev = cli.Post("/api/proposals/evaluate", body.dump(), "application/json");
  auto cm = cli.Post("/api/plan/commit", body.dump(), "application/json");
  REQUIRE(ev);
  REQUIRE(cm);
  CHECK(cm->status == 200);
  CHECK(json::parse(cm->body)["step_delta_j"] == json::parse(ev->body)["delta_j"]);
  auto again = cli.Post("/api/plan/commit", body.dump(), "application/json");
  REQUIRE(again);
  CHECK(again->status == 409);
  auto opt = cli.Options("/api/plan");
  REQUIRE(opt);
  CHECK(opt->status == 204);
  stop_server();
  server.join();
}

}
