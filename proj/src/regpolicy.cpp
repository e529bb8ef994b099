#include "rz/regpolicy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "rz/mcts.hpp"
#include "rz/random.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

namespace {

void check_prior(std::span<const double> prior) {
  if (prior.empty()) throw DomainError("prior must be nonempty");
  double sum = 0.0;
  for (double p : prior) {
    if (!(p > 0.0)) throw DomainError("prior must be strictly positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("prior must sum to 1");
}

double normalization_gap(std::span<const double> q, std::span<const double> prior, double lambda,
                         double alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += lambda * prior[i] / (alpha - q[i]);
  return s - 1.0;
}

}  // namespace

double solve_alpha(std::span<const double> q, std::span<const double> prior, double lambda) {
  check_prior(prior);
  if (q.size() != prior.size()) throw DomainError("q and prior sizes differ");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double q_max = *std::max_element(q.begin(), q.end());
  const double q_min = *std::min_element(q.begin(), q.end());
  const double p_min = *std::min_element(prior.begin(), prior.end());

  double lo = q_max + lambda * p_min;
  double hi = q_max + lambda + (q_max - q_min);
  // The gap is decreasing in alpha; widen until the bracket holds a sign change.
  for (int i = 0; i < 200 && normalization_gap(q, prior, lambda, lo) < 0.0; ++i) {
    lo = q_max + (lo - q_max) * 0.5;
  }
  for (int i = 0; i < 200 && normalization_gap(q, prior, lambda, hi) > 0.0; ++i) {
    hi = q_max + (hi - q_max) * 2.0;
  }
  // Run to machine resolution; well inside the 1e-10 target.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (normalization_gap(q, prior, lambda, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Return whichever end normalizes better.
  return std::abs(normalization_gap(q, prior, lambda, lo)) <
                 std::abs(normalization_gap(q, prior, lambda, hi))
             ? lo
             : hi;
}

InnerSolution inner_policy(std::span<const double> q, std::span<const double> prior, double lambda) {
  InnerSolution out;
  out.alpha = solve_alpha(q, prior, lambda);
  out.y.resize(q.size());
  double penalty = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.y[i] = lambda * prior[i] / (out.alpha - q[i]);
    penalty += prior[i] * std::log((out.alpha - q[i]) / lambda);
  }
  out.value = out.alpha - lambda - lambda * penalty;
  return out;
}

double inner_objective(std::span<const double> q, std::span<const double> prior, double lambda,
                       std::span<const double> y) {
  double gain = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    gain += q[i] * y[i];
    kl += prior[i] * std::log(prior[i] / y[i]);
  }
  return gain - lambda * kl;
}

OuterSolution outer_policy(std::span<const double> values, std::span<const double> prior,
                           double tau) {
  check_prior(prior);
  if (values.size() != prior.size()) throw DomainError("values and prior sizes differ");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  const double top = *std::max_element(values.begin(), values.end());
  OuterSolution out;
  out.x.resize(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.x[i] = prior[i] * std::exp((values[i] - top) / tau);
    sum += out.x[i];
  }
  for (double& v : out.x) v /= sum;
  out.value = top + tau * std::log(sum);
  return out;
}

double outer_objective(std::span<const double> values, std::span<const double> prior, double tau,
                       std::span<const double> x) {
  double gain = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    gain += x[i] * values[i];
    if (x[i] > 0.0) kl += x[i] * std::log(x[i] / prior[i]);
  }
  return gain - tau * kl;
}

void BanditSpec::validate() const {
  if (severity.empty()) throw ValidationError("bandit needs at least one hotspot");
  if (q.size() != severity.size() || prior.size() != severity.size()) {
    throw ValidationError("bandit arrays disagree in size");
  }
  for (std::size_t h = 0; h < q.size(); ++h) {
    if (q[h].empty() || q[h].size() != prior[h].size()) {
      throw ValidationError("bandit proposal arrays disagree in size");
    }
    check_prior(prior[h]);
  }
}

BanditSpec default_bandit(double tau_proposal) {
  BanditSpec b;
  b.severity = {12.0, 9.0, 6.0, 2.0};
  b.q = {{40.0, 32.0, 25.0, 12.0, 5.0, -8.0},
         {30.0, 29.0, 20.0, 10.0, 0.0, -4.0},
         {22.0, 18.0, 15.0, 9.0, 3.0, 1.0},
         {10.0, 8.0, 6.0, 4.0, 2.0, 0.0}};
  for (const auto& row : b.q) b.prior.push_back(softmax(row, tau_proposal));
  return b;
}

double puct_lambda(double c, std::int64_t visits, std::size_t num_actions) {
  return c * std::sqrt(static_cast<double>(visits)) /
         (static_cast<double>(num_actions) + static_cast<double>(visits));
}

double outer_bound_term(std::size_t num_hotspots, double delta, std::int64_t n) {
  return std::sqrt(std::log(2.0 * static_cast<double>(num_hotspots) / delta) /
                   (2.0 * static_cast<double>(n)));
}

std::vector<TrackingPoint> tracking_experiment(const BanditSpec& bandit,
                                               const TrackingParams& params) {
  bandit.validate();
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  std::vector<std::int64_t> checkpoints = params.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.empty() || checkpoints.front() < 1) {
    throw DomainError("checkpoints must be positive");
  }

  const std::size_t num_h = bandit.num_hotspots();
  std::mt19937_64 rng(params.seed);
  const std::vector<double> hotspot_probs = softmax(bandit.severity, params.tau_hotspot);
  const std::vector<double> uniform(num_h, 1.0 / static_cast<double>(num_h));
  const std::vector<double> x = outer_policy(bandit.severity, uniform, params.tau_hotspot).x;

  std::vector<std::vector<std::int64_t>> visits(num_h);
  std::vector<std::vector<double>> value_sum(num_h);
  for (std::size_t h = 0; h < num_h; ++h) {
    visits[h].assign(bandit.q[h].size(), 0);
    value_sum[h].assign(bandit.q[h].size(), 0.0);
  }

  auto gaussian = [&]() {
    // Box-Muller on the portable uniform.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  std::vector<TrackingPoint> curve;
  std::size_t next = 0;
  for (std::int64_t n = 1; next < checkpoints.size(); ++n) {
    const std::size_t h = sample_index(hotspot_probs, rng);
    std::vector<double> q_used = bandit.q[h];
    if (params.noise_sd > 0.0) {
      for (std::size_t r = 0; r < q_used.size(); ++r) {
        q_used[r] = visits[h][r] > 0 ? value_sum[h][r] / static_cast<double>(visits[h][r]) : 0.0;
      }
    }
    const std::size_t r = puct_select(q_used, bandit.prior[h], visits[h], params.puct_c);
    ++visits[h][r];
    value_sum[h][r] += bandit.q[h][r] + (params.noise_sd > 0.0 ? params.noise_sd * gaussian() : 0.0);

    while (next < checkpoints.size() && checkpoints[next] == n) {
      TrackingPoint p;
      p.n = n;
      double inner_term = 0.0;
      for (std::size_t hh = 0; hh < num_h; ++hh) {
        std::int64_t n_h = 0;
        for (std::int64_t v : visits[hh]) n_h += v;
        const std::size_t num_r = bandit.q[hh].size();
        const double lambda = puct_lambda(params.puct_c, std::max<std::int64_t>(n_h, 1), num_r);
        const std::vector<double> y = inner_policy(bandit.q[hh], bandit.prior[hh], lambda).y;
        for (std::size_t rr = 0; rr < num_r; ++rr) {
          const double empirical = static_cast<double>(visits[hh][rr]) / static_cast<double>(n);
          p.sup_distance = std::max(p.sup_distance, std::abs(empirical - x[hh] * y[rr]));
        }
        inner_term = std::max(inner_term, static_cast<double>(num_r - 1) /
                                              static_cast<double>(num_r + n_h));
      }
      p.bound = outer_bound_term(num_h, params.delta, n) + inner_term;
      p.violated = p.sup_distance > p.bound;
      curve.push_back(p);
      ++next;
    }
  }
  return curve;
}

void write_tracking_csv(std::ostream& out, std::span<const TrackingPoint> curve) {
  out << "N,sup_distance,bound,violated\n";
  for (const TrackingPoint& p : curve) {
    out << p.n << ',' << p.sup_distance << ',' << p.bound << ',' << (p.violated ? 1 : 0) << '\n';
  }
}

}  // namespace rz
