#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rz/scenario_io.hpp"
#include "rz/study.hpp"

using namespace rz;

TEST_SUITE("heuristics") {

TEST_CASE("Spearman with ties") {
  const std::vector<double> x = {1, 2, 3, 4};
  CHECK(spearman(x, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{5, 5, 5, 5}) == 0.0);
  // Ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
  CHECK(spearman(x, std::vector<double>{1, 2, 2, 3}) == doctest::Approx(4.5 / std::sqrt(5.0 * 4.5)));
  CHECK_THROWS_AS(spearman(x, std::vector<double>{1}), DomainError);
}

TEST_CASE("study rows use the rate-optimal regulation") {
  const Scenario sc = generate_preset("two-flow");
  const auto rows = heuristic_study(sc, "two-flow");
  REQUIRE_FALSE(rows.empty());
  const EngineConfig cfg;
  const DelayVector zero(sc.num_flights());
  const double base = objective(sc, zero).j_total;
  for (const FlowStudyRow& r : rows) {
    CHECK(r.best_rate >= 1);
    CHECK(r.best_rate <= static_cast<int>(r.members) + 1);
    CHECK(r.delta_j <= base);
  }
  std::ostringstream out;
  write_study_csv(out, rows);
  CHECK(out.str().rfind("scenario,hotspot,flow_id", 0) == 0);
}

}
