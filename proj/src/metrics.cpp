#include "rz/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace rz {

CellDiff cell_diff(const DemandGrid& before, const DemandGrid& after,
                   const CapacityProfile& capacities) {
  if (before.num_volumes() != after.num_volumes() || before.num_bins() != after.num_bins()) {
    throw ValidationError("cell_diff: grids are not aligned");
  }
  CellDiff out;
  for (VolumeIdx v = 0; v < before.num_volumes(); ++v) {
    bool touched = false;
    for (int t = 0; t < before.num_bins(); ++t) {
      const int b = before.demand(v, t);
      const int a = after.demand(v, t);
      if (a == b) continue;
      touched = true;
      ++out.changed_cells;
      const int c = capacities.at(v, t);
      if (b > c && a < b) ++out.overcap_reductions;
      if (a > b && a <= c) ++out.undercap_increases;
    }
    if (touched) ++out.changed_tvs;
  }
  out.beneficial_pairs = out.overcap_reductions + out.undercap_increases;
  return out;
}

double gini(std::span<const double> values) {
  const std::size_t n = values.size();
  double total = 0.0;
  for (double x : values) total += x;
  if (n == 0 || total <= 0.0) return 0.0;
  double diff = 0.0;
  for (double x : values) {
    for (double y : values) diff += std::abs(x - y);
  }
  return diff / (2.0 * static_cast<double>(n) * total);
}

std::vector<double> tv_exposure(const Scenario& scenario, const DelayVector& delays,
                                ExposureBasis basis) {
  std::vector<double> x(scenario.num_volumes(), 0.0);
  for (FlightIdx f = 0; f < scenario.num_flights(); ++f) {
    const int d = delays[f];
    if (d == 0) continue;
    if (basis == ExposureBasis::Full) {
      for (VolumeIdx v : scenario.footprint(f)) x[v] += d;
      continue;
    }
    // Dwell split; crossings without an exit time share equally when no dwell is known.
    const auto& crossings = scenario.flight(f).crossings;
    double dwell_total = 0.0;
    for (const Crossing& c : crossings) {
      if (c.exit) dwell_total += to_minutes(*c.exit - c.entry);
    }
    for (const Crossing& c : crossings) {
      const double share = dwell_total > 0.0
                               ? (c.exit ? to_minutes(*c.exit - c.entry) / dwell_total : 0.0)
                               : 1.0 / static_cast<double>(crossings.size());
      x[c.tv] += d * share;
    }
  }
  return x;
}

double tv_gini(const Scenario& scenario, const DelayVector& delays, ExposureBasis basis) {
  const std::vector<double> x = tv_exposure(scenario, delays, basis);
  return gini(x);
}

ReportRecord summarize(const Scenario& scenario, const DelayVector& before_delays,
                       const DelayVector& after_delays, const EngineConfig& config,
                       std::optional<std::int64_t> regulation_count) {
  const DemandGrid before = build_demand(scenario, before_delays);
  const DemandGrid after = build_demand(scenario, after_delays);
  ReportRecord r;
  r.before = objective(before, before_delays, config.weights);
  r.after = objective(after, after_delays, config.weights);
  r.delta_j = r.before.j_total - r.after.j_total;
  r.exceedance_reduced = r.before.j_cap - r.after.j_cap;
  r.total_delay_min = r.after.j_delay - r.before.j_delay;
  r.flights_delayed = static_cast<std::int64_t>(after_delays.count_delayed());
  if (r.exceedance_reduced > 0) {
    r.delay_per_exceedance =
        static_cast<double>(r.total_delay_min) / static_cast<double>(r.exceedance_reduced);
  }
  r.regulation_count = regulation_count;
  r.cells = cell_diff(before, after, scenario.capacities());
  r.gini_full = tv_gini(scenario, after_delays, ExposureBasis::Full);
  r.gini_dwell = tv_gini(scenario, after_delays, ExposureBasis::Dwell);
  return r;
}

namespace {

nlohmann::json objective_json(const ObjectiveBreakdown& o) {
  return {{"j_cap", o.j_cap}, {"j_delay", o.j_delay}, {"j_total", o.j_total},
          {"w_cap", o.w_cap}, {"w_delay", o.w_delay}};
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

std::string ReportRecord::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["algorithm"] = algorithm;
  j["scenario"] = scenario;
  j["before"] = objective_json(before);
  j["after"] = objective_json(after);
  j["delta_j"] = delta_j;
  j["exceedance_reduced"] = exceedance_reduced;
  j["total_delay_min"] = total_delay_min;
  j["flights_delayed"] = flights_delayed;
  j["delay_per_exceedance"] =
      delay_per_exceedance ? nlohmann::json(*delay_per_exceedance) : nlohmann::json(nullptr);
  j["regulation_count"] =
      regulation_count ? nlohmann::json(*regulation_count) : nlohmann::json(nullptr);
  j["cells"] = {{"changed_cells", cells.changed_cells},
                {"changed_tvs", cells.changed_tvs},
                {"overcap_reductions", cells.overcap_reductions},
                {"undercap_increases", cells.undercap_increases},
                {"beneficial_pairs", cells.beneficial_pairs}};
  j["gini_full"] = gini_full;
  j["gini_dwell"] = gini_dwell;
  j["runtime_ms"] = runtime_ms;
  return j.dump(2);
}

std::string ReportRecord::csv_header() {
  return "algorithm,scenario,j_before,j_after,delta_j,j_cap_before,j_cap_after,exceedance_reduced,"
         "total_delay_min,flights_delayed,delay_per_exceedance,regulation_count,changed_cells,"
         "changed_tvs,overcap_reductions,undercap_increases,beneficial_pairs,gini_full,gini_dwell,"
         "runtime_ms";
}

std::string ReportRecord::to_csv_row() const {
  std::ostringstream os;
  os << algorithm << ',' << scenario << ',' << num(before.j_total) << ',' << num(after.j_total)
     << ',' << num(delta_j) << ',' << before.j_cap << ',' << after.j_cap << ','
     << exceedance_reduced << ',' << total_delay_min << ',' << flights_delayed << ','
     << (delay_per_exceedance ? num(*delay_per_exceedance) : "") << ','
     << (regulation_count ? std::to_string(*regulation_count) : "") << ',' << cells.changed_cells
     << ',' << cells.changed_tvs << ',' << cells.overcap_reductions << ','
     << cells.undercap_increases << ',' << cells.beneficial_pairs << ',' << num(gini_full) << ','
     << num(gini_dwell) << ',' << num(runtime_ms);
  return os.str();
}

}  // namespace rz
