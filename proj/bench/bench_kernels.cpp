// Serial reference kernels against their OpenMP versions.
#include <algorithm>
#include <map>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "rz/proposals.hpp"
#include "rz/scenario_io.hpp"

namespace {

const rz::Scenario& scenario(int flights) {
  static std::map<int, rz::Scenario> cache;
  auto it = cache.find(flights);
  if (it == cache.end()) {
    rz::GeneratorParams p;
    p.num_flights = flights;
    p.num_volumes = std::max(20, flights / 25);
    p.seed = 1;
    it = cache.emplace(flights, rz::generate(p)).first;
  }
  return it->second;
}

rz::DelayVector some_delays(const rz::Scenario& sc) {
  rz::DelayVector d(sc.num_flights());
  for (rz::FlightIdx f = 0; f < sc.num_flights(); ++f) d[f] = static_cast<int>(f % 7) * 3;
  return d;
}

std::vector<rz::Regulation> candidate_regulations(const rz::Scenario& sc) {
  const rz::DelayVector zero(sc.num_flights());
  std::vector<rz::Regulation> regs;
  for (const rz::Hotspot& h : rz::detect_hotspots(rz::build_demand(sc, zero))) {
    for (int rate : {4, 8, 12, 16}) {
      rz::Regulation r;
      r.cv = h.tv;
      r.t_start = h.t_start;
      r.t_end = h.t_end;
      r.rate_per_hour = rate;
      for (const auto& rf : rz::window_flights(sc, zero, h.tv, h.t_start, h.t_end)) r.members.push_back(rf.flight);
      r.normalize();
      regs.push_back(std::move(r));
    }
  }
  return regs;
}

void BM_BuildDemandSerial(benchmark::State& state) {
  const auto& sc = scenario(static_cast<int>(state.range(0)));
  const auto d = some_delays(sc);
  for (auto _ : state) benchmark::DoNotOptimize(rz::reference::build_demand(sc, d));
}

void BM_BuildDemandParallel(benchmark::State& state) {
  const auto& sc = scenario(static_cast<int>(state.range(0)));
  const auto d = some_delays(sc);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(rz::build_demand(sc, d));
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto& sc = scenario(static_cast<int>(state.range(0)));
  const auto regs = candidate_regulations(sc);
  const rz::DelayVector zero(sc.num_flights());
  for (auto _ : state) benchmark::DoNotOptimize(rz::reference::score_regulations(sc, zero, regs, {}));
  state.counters["regulations"] = static_cast<double>(regs.size());
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto& sc = scenario(static_cast<int>(state.range(0)));
  const auto regs = candidate_regulations(sc);
  const rz::DelayVector zero(sc.num_flights());
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(rz::score_regulations(sc, zero, regs, {}));
  state.counters["regulations"] = static_cast<double>(regs.size());
}

}  // namespace

BENCHMARK(BM_BuildDemandSerial)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BuildDemandParallel)->ArgsProduct({{500, 5000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreSerial)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->ArgsProduct({{500, 5000}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
