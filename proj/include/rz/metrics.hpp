#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rz/traffic_model.hpp"

namespace rz {

struct CellDiff {
  std::int64_t changed_cells = 0;
  std::int64_t changed_tvs = 0;
  std::int64_t overcap_reductions = 0;  // D_before > C and D_after < D_before
  std::int64_t undercap_increases = 0;  // D_after > D_before and D_after <= C
  std::int64_t beneficial_pairs = 0;

  friend bool operator==(const CellDiff&, const CellDiff&) = default;
};

/// Cell-level comparison of rolling-hour demand. Throws ValidationError on misaligned grids.
CellDiff cell_diff(const DemandGrid& before, const DemandGrid& after,
                   const CapacityProfile& capacities);

/// Gini coefficient: sum |x_i - x_j| over ordered pairs / (2 n sum x). 0 for empty or all-zero input.
double gini(std::span<const double> values);

enum class ExposureBasis {
  Full,   // each flight's whole delay counts at every volume it crosses
  Dwell,  // delay split across crossed volumes by dwell time
};

/// Per-volume delay exposure.
std::vector<double> tv_exposure(const Scenario& scenario, const DelayVector& delays,
                                ExposureBasis basis = ExposureBasis::Full);

double tv_gini(const Scenario& scenario, const DelayVector& delays,
               ExposureBasis basis = ExposureBasis::Full);

struct ReportRecord {
  std::string algorithm;
  std::string scenario;
  ObjectiveBreakdown before;
  ObjectiveBreakdown after;
  double delta_j = 0.0;
  std::int64_t exceedance_reduced = 0;
  std::int64_t total_delay_min = 0;
  std::int64_t flights_delayed = 0;
  std::optional<double> delay_per_exceedance;  // empty when nothing was reduced
  std::optional<std::int64_t> regulation_count;
  CellDiff cells;
  double gini_full = 0.0;
  double gini_dwell = 0.0;
  double runtime_ms = 0.0;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Report for moving from `before_delays` (usually all zero) to `after_delays`.
ReportRecord summarize(const Scenario& scenario, const DelayVector& before_delays,
                       const DelayVector& after_delays, const EngineConfig& config = {},
                       std::optional<std::int64_t> regulation_count = std::nullopt);

}  // namespace rz
