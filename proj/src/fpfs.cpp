#include "rz/fpfs.hpp"

#include <algorithm>
#include <numeric>

namespace rz {

namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  // den > 0
  return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}

constexpr std::int64_t kTicksPerHour = 60 * kTicksPerMinute;

}  // namespace

bool Regulation::targets(FlightIdx f) const {
  return std::binary_search(members.begin(), members.end(), f);
}

void Regulation::normalize() {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
}

void Regulation::validate(const Scenario& scenario) const {
  if (cv >= scenario.num_volumes()) throw DomainError("regulation: unknown control volume");
  const int nb = scenario.grid().num_bins;
  if (t_start < 0 || t_end >= nb || t_start > t_end) {
    throw ValidationError("regulation: window must satisfy 0 <= t_start <= t_end < num_bins");
  }
  if (rate_per_hour < 1) throw ValidationError("regulation: rate_per_hour must be >= 1");
  if (anchor_margin_bins < 0) throw ValidationError("regulation: anchor margin must be >= 0");
  if (!std::is_sorted(members.begin(), members.end()) ||
      std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw ValidationError("regulation: members must be sorted and unique");
  }
  if (!members.empty() && members.back() >= scenario.num_flights()) {
    throw ValidationError("regulation: member outside the scenario");
  }
}

std::string Regulation::descriptor(const Scenario& scenario) const {
  return scenario.volume_name(cv) + "[" + std::to_string(t_start) + "-" + std::to_string(t_end) +
         "]r" + std::to_string(rate_per_hour) + "n" + std::to_string(members.size());
}

std::pair<int, int> effective_window(int t_start, int t_end, const TimeGrid& grid) {
  return {std::max(t_start, 0), std::min(t_end + grid.trailing_bins(), grid.num_bins - 1)};
}

namespace {

template <typename Pred>
std::vector<RegulatedFlight> collect_window(const Scenario& scenario, const DelayVector& delays,
                                            VolumeIdx cv, int t_start, int t_end, Pred&& keep) {
  if (cv >= scenario.num_volumes()) throw DomainError("unknown control volume");
  const TimeGrid& grid = scenario.grid();
  const auto [lo, hi] = effective_window(t_start, t_end, grid);
  const Ticks day = grid.day_ticks();
  std::vector<RegulatedFlight> out;
  for (const VolumeEntry& e : scenario.entries_at(cv)) {
    if (!keep(e.flight)) continue;
    const Ticks shifted = e.entry + static_cast<Ticks>(delays[e.flight]) * kTicksPerMinute;
    if (shifted >= day) continue;
    const int b = bin_of_ticks(shifted, grid);
    if (b < lo || b > hi) continue;
    out.push_back({e.flight, shifted});
  }
  std::sort(out.begin(), out.end(), [](const RegulatedFlight& a, const RegulatedFlight& b) {
    return a.entry != b.entry ? a.entry < b.entry : a.flight < b.flight;
  });
  return out;
}

}  // namespace

std::vector<RegulatedFlight> regulated_flights(const Scenario& scenario, const DelayVector& delays,
                                               const Regulation& reg) {
  if (reg.members.empty()) {
    if (reg.cv >= scenario.num_volumes()) throw DomainError("unknown control volume");
    return {};
  }
  return collect_window(scenario, delays, reg.cv, reg.t_start, reg.t_end,
                        [&](FlightIdx f) { return reg.targets(f); });
}

std::vector<RegulatedFlight> window_flights(const Scenario& scenario, const DelayVector& delays,
                                            VolumeIdx cv, int t_start, int t_end) {
  return collect_window(scenario, delays, cv, t_start, t_end, [](FlightIdx) { return true; });
}

std::vector<SlotAssignment> allocate(const Regulation& reg,
                                     std::span<const RegulatedFlight> flights,
                                     const TimeGrid& grid, int max_delay_min) {
  if (reg.rate_per_hour <= 0) throw DomainError("allocate: rate_per_hour must be positive");
  const std::int64_t rate = reg.rate_per_hour;
  const Ticks anchor = static_cast<Ticks>(reg.t_start - reg.anchor_margin_bins) * grid.bin_ticks();
  // Slot m sits at anchor + m * kTicksPerHour / rate; everything below is scaled by `rate`.
  std::vector<SlotAssignment> out;
  out.reserve(flights.size());
  std::int64_t prev = -1;
  for (const RegulatedFlight& rf : flights) {
    const std::int64_t earliest = ceil_div((rf.entry - anchor) * rate, kTicksPerHour);
    const std::int64_t m = std::max(prev + 1, earliest);
    prev = m;
    const std::int64_t slot_scaled = anchor * rate + m * kTicksPerHour;
    const std::int64_t wait_scaled = slot_scaled - rf.entry * rate;
    SlotAssignment a;
    a.flight = rf.flight;
    a.entry_min = to_minutes(rf.entry);
    a.slot_min = static_cast<double>(slot_scaled) / static_cast<double>(rate * kTicksPerMinute);
    a.slot_index = m;
    const std::int64_t delay = ceil_div(wait_scaled, rate * kTicksPerMinute);
    if (delay > max_delay_min) {
      a.delay_min = max_delay_min;
      a.clamped = true;
    } else {
      a.delay_min = static_cast<int>(delay);
    }
    out.push_back(a);
  }
  return out;
}

DelayVector apply_regulation(const Scenario& scenario, DelayVector delays, const Regulation& reg,
                             int max_delay_min, std::vector<SlotAssignment>* assignments) {
  const auto flights = regulated_flights(scenario, delays, reg);
  auto slots = allocate(reg, flights, scenario.grid(), max_delay_min);
  for (SlotAssignment& a : slots) {
    const int total = delays[a.flight] + a.delay_min;
    if (total > max_delay_min) {
      delays[a.flight] = max_delay_min;
      a.clamped = true;
    } else {
      delays[a.flight] = total;
    }
  }
  if (assignments) *assignments = std::move(slots);
  return delays;
}

DelayVector compose_sequential(const Scenario& scenario, std::span<const Regulation> regulations,
                               int max_delay_min) {
  DelayVector delays(scenario.num_flights());
  for (const Regulation& reg : regulations) {
    delays = apply_regulation(scenario, std::move(delays), reg, max_delay_min);
  }
  return delays;
}

DelayVector compose_mpr(const Scenario& scenario, std::span<const Regulation> regulations,
                        int max_delay_min) {
  const DelayVector undelayed(scenario.num_flights());
  DelayVector out(scenario.num_flights());
  for (const Regulation& reg : regulations) {
    const auto flights = regulated_flights(scenario, undelayed, reg);
    for (const SlotAssignment& a : allocate(reg, flights, scenario.grid(), max_delay_min)) {
      out[a.flight] = std::max(out[a.flight], a.delay_min);
    }
  }
  return out;
}

double Plan::total_delta_j() const {
  return std::accumulate(delta_j.begin(), delta_j.end(), 0.0);
}

Plan build_plan(const Scenario& scenario, std::vector<Regulation> regulations,
                const EngineConfig& config) {
  return build_plan(scenario, DelayVector(scenario.num_flights()), std::move(regulations), config);
}

Plan build_plan(const Scenario& scenario, DelayVector start, std::vector<Regulation> regulations,
                const EngineConfig& config) {
  Plan plan;
  plan.delays = std::move(start);
  plan.baseline = objective(scenario, plan.delays, config.weights);
  ObjectiveBreakdown prev = plan.baseline;
  for (const Regulation& reg : regulations) {
    reg.validate(scenario);
    plan.delays = apply_regulation(scenario, std::move(plan.delays), reg,
                                   config.max_delay_per_flight_min);
    ObjectiveBreakdown next = objective(scenario, plan.delays, config.weights);
    plan.delta_j.push_back(prev.j_total - next.j_total);
    plan.after.push_back(next);
    prev = next;
  }
  plan.regulations = std::move(regulations);
  return plan;
}

}  // namespace rz
