#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rz/flows.hpp"
#include "rz/heuristics.hpp"
#include "rz/proposals.hpp"

namespace rz {

/// One flow of the heuristic study, measured at its rate-optimal regulation.
struct FlowStudyRow {
  std::string scenario;
  std::string hotspot;
  int flow_id = 0;
  std::size_t members = 0;
  int nomrel = 0;
  int inload = 0;
  int best_rate = 0;      // argmax of delta J over the rate grid
  double delta_j = 0.0;   // at best_rate
  std::int64_t scoped_relief = 0;   // excess removed at the flow's hot cells
  std::int64_t network_relief = 0;  // excess removed everywhere (delta J_cap)
};

struct StudyParams {
  ExtractionParams extraction;
  PriorityParams priority;
  int max_rate = 60;  // grid 1..min(max_rate, members + 1)
};

/// Rate-optimal study of every flow extracted at every initial hotspot.
std::vector<FlowStudyRow> heuristic_study(const Scenario& scenario, const std::string& label,
                                          const StudyParams& params = {},
                                          const EngineConfig& config = {});

void write_study_csv(std::ostream& out, std::span<const FlowStudyRow> rows);

/// Spearman rank correlation with average ranks for ties; 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace rz
