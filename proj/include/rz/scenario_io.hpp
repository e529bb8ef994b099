#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rz/fpfs.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

/// Reads flight and capacity CSVs. `source` names are used in line-numbered errors.
Scenario read_scenario(std::istream& flights, std::istream& capacities,
                       const std::string& flights_source = "flights.csv",
                       const std::string& capacities_source = "capacities.csv",
                       TimeGrid grid = {});
Scenario load_scenario(const std::filesystem::path& flights_file,
                       const std::filesystem::path& capacities_file, TimeGrid grid = {});

void write_flights_csv(std::ostream& out, const Scenario& scenario);
void write_capacities_csv(std::ostream& out, const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& flights_file,
                   const std::filesystem::path& capacities_file);

/// Decimal minutes with one fractional digit, e.g. 481.5.
std::string format_minutes(Ticks t);
/// Parses decimal minutes, rounding to the nearest tenth. Throws std::invalid_argument.
Ticks parse_minutes(const std::string& text);

inline constexpr int kPlanSchemaVersion = 1;

/// Serialized plan: regulations in order plus the per-step log they produced.
struct PlanDocument {
  std::vector<Regulation> regulations;
  std::vector<double> delta_j;
  std::vector<ObjectiveBreakdown> after;
  ObjectiveBreakdown baseline;
  std::string algorithm;
};

PlanDocument to_document(const Plan& plan, std::string algorithm = {});
std::string plan_to_json(const Scenario& scenario, const PlanDocument& doc);
/// Throws ValidationError on an unknown schema version or unknown names.
PlanDocument plan_from_json(const Scenario& scenario, const std::string& text);
void save_plan(const Scenario& scenario, const PlanDocument& doc, const std::filesystem::path& file);
PlanDocument load_plan(const Scenario& scenario, const std::filesystem::path& file);

struct RouteTemplate {
  std::vector<int> volumes;        // indices into the generated volume list
  std::vector<double> travel_min;  // minutes between consecutive entries, size volumes - 1
  double weight = 1.0;
};

struct DeparturePeak {
  double mean_min = 600.0;  // first-entry time
  double sd_min = 60.0;
  double weight = 1.0;
};

struct CapacityDip {
  int volume = 0;
  int first_bin = 0;
  int last_bin = 0;
  double factor = 0.6;
};

struct GeneratorParams {
  int num_flights = 500;
  int num_volumes = 20;
  int num_routes = 14;  // random templates when `routes` is empty
  int min_route_len = 3;
  int max_route_len = 6;
  std::vector<RouteTemplate> routes;
  std::vector<DeparturePeak> peaks = {{480.0, 50.0, 0.4}, {750.0, 60.0, 0.35}, {1050.0, 55.0, 0.25}};
  /// Hourly capacity of each volume as a fraction of its own undelayed peak
  /// rolling-hour demand, drawn from [ratio_min, ratio_max]. With ratio_max 0
  /// capacities are drawn from [capacity_min, capacity_max] instead.
  double capacity_ratio_min = 0.75;
  double capacity_ratio_max = 1.0;
  int capacity_min = 4;  // also the floor in ratio mode
  int capacity_max = 16;
  int num_dips = 4;  // random dips when `dips` is empty
  std::vector<CapacityDip> dips;
  double dwell_min = 8.0;  // exit minus entry when no next crossing follows
  std::uint64_t seed = 0;

  void validate() const;
};

Scenario generate(const GeneratorParams& params);

/// Named fixtures: "default", "cascade", "cascade-ordering", "two-flow", "bandit".
Scenario generate_preset(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> preset_names();

}  // namespace rz
