#include <doctest.h>

#include "fixtures.hpp"
#include "rz/flows.hpp"
#include "rz/scenario_io.hpp"

using namespace rz;
using rz::test::make_scenario;

namespace {

SimilarityGraph graph_from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  SimilarityGraph g;
  for (std::size_t i = 0; i < n; ++i) g.flights.push_back(static_cast<FlightIdx>(i));
  g.adjacency.assign(n, {});
  for (auto [a, b] : edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  g.num_edges = edges.size();
  return g;
}

}  // namespace

TEST_SUITE("flow-extractor") {

TEST_CASE("jaccard worked example and trivials") {
  const std::vector<VolumeIdx> a = {1, 2, 3, 4};
  const std::vector<VolumeIdx> b = {3, 4, 5, 6};
  CHECK(jaccard(a, b) == 1.0 / 3.0);
  CHECK(jaccard(a, a) == 1.0);
  const std::vector<VolumeIdx> c = {7, 8};
  CHECK(jaccard(a, c) == 0.0);
  CHECK(jaccard(std::vector<VolumeIdx>{}, std::vector<VolumeIdx>{}) == 0.0);
}

TEST_CASE("footprint dedupes and sorts") {
  Flight f;
  f.crossings = {{3, 10, {}}, {1, 20, {}}, {3, 30, {}}};
  CHECK(footprint_of(f) == Footprint{1, 3});
}

TEST_CASE("similarity graph thresholds") {
  const Scenario sc = make_scenario({"A", "B", "C", "D", "E", "F"},
                                    {{"F1", {{"A", 600}, {"B", 610}, {"C", 620}, {"D", 630}}},
                                     {"F2", {{"C", 600}, {"D", 610}, {"E", 620}, {"F", 630}}}});
  const std::vector<FlightIdx> both = {0, 1};
  CHECK(build_graph(sc, both, 0.72).num_edges == 0);
  CHECK(build_graph(sc, both, 1e-9).num_edges == 1);
  const SimilarityGraph single = build_graph(sc, std::vector<FlightIdx>{0}, 0.72);
  CHECK(single.num_vertices() == 1);
  CHECK(single.num_edges == 0);
}

TEST_CASE("two disconnected cliques give two communities") {
  const auto g = graph_from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
  const auto labels = detect_communities(g, {});
  CHECK(labels == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(modularity(g, labels, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("complete graph stays whole") {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) edges.push_back({i, j});
  const auto labels = detect_communities(graph_from_edges(6, edges), {});
  CHECK(labels == std::vector<int>(6, 0));
}

TEST_CASE("empty edge set leaves singletons") {
  const auto labels = detect_communities(graph_from_edges(4, {}), {});
  CHECK(labels == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("communities never span components") {
  // Path 0-1-2 plus a separate pair 3-4.
  const auto labels = detect_communities(graph_from_edges(5, {{0, 1}, {1, 2}, {3, 4}}), {});
  CHECK(labels[3] == labels[4]);
  CHECK(labels[0] != labels[3]);
  CHECK(labels[2] != labels[4]);
}

TEST_CASE("two-flow preset splits into two flows") {
  const Scenario sc = generate_preset("two-flow");
  const DelayVector zero(sc.num_flights());
  const auto hs = detect_hotspots(build_demand(sc, zero));
  REQUIRE_FALSE(hs.empty());
  const FlowExtraction ex = extract_flows(hs.front(), sc, zero, {});
  CHECK(ex.flows.size() == 2);
  // Same inputs, same partition.
  const FlowExtraction again = extract_flows(hs.front(), sc, zero, {});
  REQUIRE(again.flows.size() == ex.flows.size());
  for (std::size_t i = 0; i < ex.flows.size(); ++i) CHECK(again.flows[i].members == ex.flows[i].members);
}

TEST_CASE("flights on one route form one flow") {
  std::vector<rz::test::FlightSpec> specs;
  for (int i = 0; i < 8; ++i) {
    specs.push_back({"F" + std::to_string(i), {{"A", 600.0 + i}, {"B", 620.0 + i}}});
  }
  const Scenario sc = make_scenario({"A", "B"}, specs, 4);
  const DelayVector zero(sc.num_flights());
  const auto hs = detect_hotspots(build_demand(sc, zero));
  REQUIRE_FALSE(hs.empty());
  const FlowExtraction ex = extract_flows(hs.front(), sc, zero, {});
  REQUIRE(ex.flows.size() == 1);
  CHECK(ex.flows[0].members.size() == 8);
}

TEST_CASE("hotspot without traffic yields no flows") {
  const Scenario sc = make_scenario({"A", "B"}, {{"F1", {{"A", 600.0}}}});
  const FlowExtraction ex = extract_flows(Hotspot{1, 40, 40}, sc, DelayVector(1), {});
  CHECK(ex.flows.empty());
}

TEST_CASE("make_flow attributes member demand") {
  const Scenario sc = make_scenario({"A"}, {{"F1", {{"A", 600.0}}}, {"F2", {{"A", 616.0}}}});
  const Flow f = make_flow(sc, DelayVector(2), Hotspot{0, 40, 41}, {0, 1});
  const TouchedWindow* w = f.window_at(0);
  REQUIRE(w);
  CHECK(w->lo == 40);
  CHECK(w->hi == 41);
  CHECK(w->attributed_entries[40] == 1);
  CHECK(w->attributed_demand[38] == 2);
  CHECK(w->attributed_demand[41] == 1);
}

TEST_CASE("extraction params validate") {
  ExtractionParams p;
  p.similarity_threshold = 1.5;
  CHECK_THROWS(p.validate());
}

}
