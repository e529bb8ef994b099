#include "rz/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rz/fpfs.hpp"

namespace rz {

std::vector<FlowStudyRow> heuristic_study(const Scenario& scenario, const std::string& label,
                                          const StudyParams& params, const EngineConfig& config) {
  const DelayVector zero(scenario.num_flights());
  const DemandGrid demand = build_demand(scenario, zero);
  const ObjectiveBreakdown base = objective(demand, zero, config.weights);
  std::vector<FlowStudyRow> rows;
  for (const Hotspot& h : detect_hotspots(demand)) {
    const FlowExtraction ex = extract_flows(h, scenario, zero, params.extraction);
    const std::string id = scenario.volume_name(h.tv) + ":" + std::to_string(h.t_start) + "-" +
                           std::to_string(h.t_end);
    for (const Flow& flow : ex.flows) {
      FlowStudyRow row;
      row.scenario = label;
      row.hotspot = id;
      row.flow_id = flow.id;
      row.members = flow.members.size();
      const FlowScore score = score_flow(flow, demand, scenario.capacities(), params.priority);
      row.nomrel = score.nomrel;
      row.inload = score.inload;
      const std::vector<HotCell> cells = hot_cells(flow, demand, scenario.capacities());

      const int top = std::min(params.max_rate, static_cast<int>(flow.members.size()) + 1);
      std::vector<Regulation> regs;
      for (int rate = 1; rate <= top; ++rate) {
        Regulation r;
        r.cv = h.tv;
        r.t_start = h.t_start;
        r.t_end = h.t_end;
        r.rate_per_hour = rate;
        r.members = flow.members;
        regs.push_back(std::move(r));
      }
      const std::vector<ObjectiveBreakdown> scored = score_regulations(scenario, zero, regs, config);
      // Ties go to the higher rate, which delays less.
      std::size_t best = 0;
      for (std::size_t i = 1; i < scored.size(); ++i) {
        if (scored[i].j_total <= scored[best].j_total) best = i;
      }
      row.best_rate = regs[best].rate_per_hour;
      row.delta_j = base.j_total - scored[best].j_total;
      row.network_relief = base.j_cap - scored[best].j_cap;

      const DelayVector after =
          apply_regulation(scenario, zero, regs[best], config.max_delay_per_flight_min);
      const DemandGrid shifted = build_demand(scenario, after);
      for (const HotCell& c : cells) {
        row.scoped_relief += demand.excess(c.tv, c.bin) - shifted.excess(c.tv, c.bin);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_study_csv(std::ostream& out, std::span<const FlowStudyRow> rows) {
  out << "scenario,hotspot,flow_id,members,nomrel,inload,best_rate,delta_j,scoped_relief,"
         "network_relief\n";
  for (const FlowStudyRow& r : rows) {
    out << r.scenario << ',' << r.hotspot << ',' << r.flow_id << ',' << r.members << ','
        << r.nomrel << ',' << r.inload << ',' << r.best_rate << ',' << r.delta_j << ','
        << r.scoped_relief << ',' << r.network_relief << '\n';
  }
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman: sizes differ");
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace rz
