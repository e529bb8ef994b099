#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rz {

/// Root alpha > max(q) of sum lambda * P / (alpha - q) = 1, by bisection.
/// Throws DomainError for an empty or non-normalized prior or lambda <= 0.
double solve_alpha(std::span<const double> q, std::span<const double> prior, double lambda);

struct InnerSolution {
  std::vector<double> y;  // argmax of q.y - lambda * KL(P || y)
  double value = 0.0;     // attained maximum
  double alpha = 0.0;
};

InnerSolution inner_policy(std::span<const double> q, std::span<const double> prior, double lambda);

/// q.y - lambda * KL(P || y); the inner objective at any simplex point.
double inner_objective(std::span<const double> q, std::span<const double> prior, double lambda,
                       std::span<const double> y);

struct OuterSolution {
  std::vector<double> x;  // proportional to P_H * exp(U / tau)
  double value = 0.0;     // tau * log sum P_H * exp(U / tau)
};

OuterSolution outer_policy(std::span<const double> values, std::span<const double> prior,
                           double tau);

/// x.U - tau * KL(x || P_H); the outer objective at any simplex point.
double outer_objective(std::span<const double> values, std::span<const double> prior, double tau,
                       std::span<const double> x);

/// Frozen bandit: hotspot severities and, per hotspot, proposal values and priors.
struct BanditSpec {
  std::vector<double> severity;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> prior;

  void validate() const;
  std::size_t num_hotspots() const { return severity.size(); }
};

/// Four hotspots, six proposals each, priors from a softmax of q.
BanditSpec default_bandit(double tau_proposal = 24.0);

struct TrackingParams {
  std::vector<std::int64_t> checkpoints = {50, 100, 200, 400, 800, 1600, 3200};
  double delta = 0.05;
  double puct_c = 64.0;
  double tau_hotspot = 6.0;
  /// Standard deviation of sampled rewards; 0 freezes Q at the true values.
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct TrackingPoint {
  std::int64_t n = 0;
  double sup_distance = 0.0;
  double bound = 0.0;
  bool violated = false;
};

/// lambda_N = c * sqrt(N) / (|R| + N), the regularization PUCT tracks after N visits.
double puct_lambda(double c, std::int64_t visits, std::size_t num_actions);

/// sqrt(log(2|H| / delta) / (2N)).
double outer_bound_term(std::size_t num_hotspots, double delta, std::int64_t n);

/// Runs the planner's hotspot sampling and PUCT selection on the bandit and
/// compares the joint visit frequencies with the regularized policy.
std::vector<TrackingPoint> tracking_experiment(const BanditSpec& bandit,
                                               const TrackingParams& params);

void write_tracking_csv(std::ostream& out, std::span<const TrackingPoint> curve);

}  // namespace rz
