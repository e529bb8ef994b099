#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rz/regpolicy.hpp"
#include "rz/traffic_model.hpp"

using namespace rz;

TEST_SUITE("regpolicy-diagnostics") {

TEST_CASE("alpha closed forms") {
  CHECK(solve_alpha(std::vector<double>{2.0}, std::vector<double>{1.0}, 0.5) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK(solve_alpha(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}, 1.0) ==
        doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(solve_alpha(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.6}, 1.0),
                  DomainError);
  CHECK_THROWS_AS(solve_alpha(std::vector<double>{1.0}, std::vector<double>{1.0}, 0.0), DomainError);
}

TEST_CASE("alpha gap grows with lambda") {
  const std::vector<double> q = {1.0, 0.5, -1.0};
  const std::vector<double> p = {0.2, 0.3, 0.5};
  const double g1 = solve_alpha(q, p, 1.0) - 1.0;
  const double g10 = solve_alpha(q, p, 10.0) - 1.0;
  CHECK(g10 > g1);
  // Large lambda: alpha - lambda tends to the prior mean of q.
  CHECK(solve_alpha(q, p, 1000.0) - 1000.0 == doctest::Approx(-0.15).epsilon(0.01));
}

TEST_CASE("inner policy") {
  const auto one = inner_policy(std::vector<double>{3.0}, std::vector<double>{1.0}, 0.7);
  CHECK(one.y[0] == doctest::Approx(1.0));
  CHECK(one.value == doctest::Approx(3.0));

  const auto sym = inner_policy(std::vector<double>{1.0, 1.0, 1.0},
                                std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 2.0);
  for (double y : sym.y) CHECK(y == doctest::Approx(1.0 / 3));

  const auto two = inner_policy(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}, 1.0);
  CHECK(two.y[0] == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(two.y[1] == doctest::Approx(0.2929).epsilon(1e-4));
  CHECK(std::accumulate(two.y.begin(), two.y.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("outer policy") {
  const auto eq = outer_policy(std::vector<double>{2.0, 2.0}, std::vector<double>{0.5, 0.5}, 6.0);
  CHECK(eq.x[0] == doctest::Approx(0.5));
  const auto two = outer_policy(std::vector<double>{6.0, 0.0}, std::vector<double>{0.5, 0.5}, 6.0);
  CHECK(two.x[0] == doctest::Approx(0.731).epsilon(1e-3));
  CHECK(two.x[1] == doctest::Approx(0.269).epsilon(1e-3));
  const auto sharp = outer_policy(std::vector<double>{6.0, 0.0}, std::vector<double>{0.5, 0.5}, 1e-3);
  CHECK(sharp.x[0] == doctest::Approx(1.0));
  CHECK(outer_objective(std::vector<double>{6.0, 0.0}, std::vector<double>{0.5, 0.5}, 6.0, two.x) ==
        doctest::Approx(two.value));
}

TEST_CASE("bound terms") {
  CHECK(outer_bound_term(4, 0.05, 100) == doctest::Approx(std::sqrt(std::log(160.0) / 200.0)));
  CHECK(outer_bound_term(4, 0.05, 100) == doctest::Approx(0.159).epsilon(1e-3));
  CHECK(outer_bound_term(4, 0.05, 100000000) < 1e-3);
  CHECK(puct_lambda(64.0, 100, 6) == doctest::Approx(64.0 * 10.0 / 106.0));
}

TEST_CASE("tracking curve on the bandit") {
  const BanditSpec b = default_bandit();
  CHECK(b.num_hotspots() == 4);
  TrackingParams tp;
  tp.seed = 1;
  const auto curve = tracking_experiment(b, tp);
  REQUIRE(curve.size() == tp.checkpoints.size());
  for (const auto& p : curve) CHECK(p.bound > 0.0);
  CHECK(curve.back().bound < curve.front().bound);
}

}
