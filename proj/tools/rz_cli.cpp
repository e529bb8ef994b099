// rz: batch entry points for planning, baselines and studies.

#include <omp.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rz/baselines.hpp"
#include "rz/metrics.hpp"
#include "rz/mcts.hpp"
#include "rz/scenario_io.hpp"
#include "rz/study.hpp"
#include "rz/whatif.hpp"

#ifndef RZ_VERSION
#define RZ_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_name(const std::string& flag) {
  std::string out = "RZ_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <class T>
CLI::Option* opt(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
  return app->add_option("--" + name, var, desc)->capture_default_str()->envname(env_name(name));
}

CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& desc) {
  return app->add_flag("--" + name, var, desc)->envname(env_name(name));
}

struct Common {
  std::string flights;
  std::string capacities;
  std::string preset;
  std::uint64_t scenario_seed = 0;
  std::string out = "out";
  int threads = 1;
  double max_minutes = 0.0;
  bool no_timing = false;
  double w_cap = 10.0;
  double w_delay = 1.0;
  int max_delay = 120;

  rz::EngineConfig engine() const {
    rz::EngineConfig c;
    c.weights.w_cap = w_cap;
    c.weights.w_delay = w_delay;
    c.max_delay_per_flight_min = max_delay;
    return c;
  }
};

void add_common(CLI::App* app, Common& c) {
  opt(app, "flights", c.flights, "Flight crossings CSV");
  opt(app, "capacities", c.capacities, "Capacity CSV");
  opt(app, "preset", c.preset, "Built-in scenario instead of CSV files");
  opt(app, "scenario-seed", c.scenario_seed, "Seed for --preset");
  opt(app, "out", c.out, "Output directory");
  opt(app, "threads", c.threads, "OpenMP threads")->check(CLI::PositiveNumber);
  opt(app, "max-minutes", c.max_minutes, "Wall-clock budget per run; 0 means none")
      ->check(CLI::NonNegativeNumber);
  flag(app, "no-timing", c.no_timing, "Write 0 for elapsed times so logs are byte-identical");
  opt(app, "w-cap", c.w_cap, "Exceedance weight");
  opt(app, "w-delay", c.w_delay, "Delay weight");
  opt(app, "max-delay-per-flight-min", c.max_delay, "Per-flight delay cap");
}

void add_search(CLI::App* app, rz::SearchParams& p) {
  opt(app, "sims", p.sims, "Simulations per search");
  opt(app, "depth", p.depth, "Maximum actions per simulation");
  opt(app, "commit-depth", p.commit_depth, "Regulations committed from the principal variation");
  opt(app, "flows-threshold", p.proposals.extraction.similarity_threshold,
      "Jaccard edge threshold for flow extraction");
  opt(app, "flows-resolution", p.proposals.extraction.resolution, "Community detection resolution");
  opt(app, "max-hotspots-per-node", p.max_hotspots_per_node, "Hotspot candidates per node");
  opt(app, "k-proposals-per-hotspot", p.proposals.k_top, "Proposals kept per hotspot");
  opt(app, "puct-c", p.puct_c, "PUCT exploration constant");
  opt(app, "gamma", p.gamma, "Discount factor");
  opt(app, "regulation-selection-softmax-temperature", p.tau_proposal, "Proposal prior temperature");
  opt(app, "hotspot-sampling-temperature", p.tau_hotspot, "Hotspot sampling temperature");
  opt(app, "seed", p.seed, "Search seed");
  flag(app, "receding-horizon", p.receding_horizon, "Commit one regulation per search");
}

void add_sa(CLI::App* app, rz::SaParams& p) {
  opt(app, "iters", p.iters, "Annealing iterations");
  opt(app, "t0", p.t0, "Initial temperature");
  opt(app, "cooling", p.cooling, "Geometric cooling rate");
  opt(app, "t-min", p.t_min, "Minimum temperature");
  opt(app, "sa-step-choices", p.step_choices, "Delay step sizes (minutes)")->delimiter(',');
}

void add_ga(CLI::App* app, rz::GaParams& p) {
  opt(app, "population-size", p.population_size, "Population size");
  opt(app, "generations", p.generations, "Generations");
  opt(app, "p-crossover", p.p_crossover, "Crossover probability");
  opt(app, "mutations-per-child", p.mutations_per_child, "Mutations per child");
  opt(app, "mutate-existing-prob", p.mutate_existing_prob, "Probability a mutation edits a delayed flight");
  opt(app, "step-choices", p.step_choices, "Delay step sizes (minutes)")->delimiter(',');
  opt(app, "allow-negative-moves", p.allow_negative_moves, "Allow delay decreases");
  opt(app, "init-delayed-flights-min", p.init_delayed_flights_min, "Initial delayed flights, lower bound");
  opt(app, "init-delayed-flights-max", p.init_delayed_flights_max, "Initial delayed flights, upper bound");
}

rz::Scenario load(const Common& c) {
  try {
    if (!c.preset.empty()) return rz::generate_preset(c.preset, c.scenario_seed);
    if (c.flights.empty() || c.capacities.empty()) {
      throw ConfigError("either --preset or both --flights and --capacities are required");
    }
    return rz::load_scenario(c.flights, c.capacities);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

std::string scenario_label(const Common& c) {
  if (!c.preset.empty()) return c.preset + "#" + std::to_string(c.scenario_seed);
  return fs::path(c.flights).stem().string();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

// Resolved value of every option on `app` and its parents.
json resolved_options(const CLI::App* app) {
  json out = json::object();
  for (const CLI::App* a = app; a; a = a->get_parent()) {
    for (const CLI::Option* o : a->get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string name = o->get_lnames().front();
      if (name == "help" || out.contains(name)) continue;
      if (o->count() > 0) {
        const auto& r = o->results();
        std::string joined;
        for (std::size_t i = 0; i < r.size(); ++i) joined += (i ? "," : "") + r[i];
        out[name] = joined;
      } else {
        out[name] = o->get_default_str();
      }
    }
  }
  return out;
}

void write_manifest(const fs::path& dir, const CLI::App* app, const std::string& command,
                    const json& extra = json::object()) {
  json m;
  m["tool"] = "rz";
  m["version"] = RZ_VERSION;
  m["command"] = command;
  m["options"] = resolved_options(app);
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

void write_report(const fs::path& dir, const std::string& stem, const rz::ReportRecord& r) {
  write_file(dir / (stem + ".json"), r.to_json() + "\n");
  write_file(dir / (stem + ".csv"), rz::ReportRecord::csv_header() + "\n" + r.to_csv_row() + "\n");
}

std::string delays_csv(const rz::Scenario& s, const rz::DelayVector& d) {
  std::ostringstream os;
  os << "flight_id,delay_min\n";
  for (rz::FlightIdx f = 0; f < s.num_flights(); ++f) {
    if (d[f] != 0) os << s.flight(f).id << ',' << d[f] << '\n';
  }
  return os.str();
}

rz::ReportRecord report_for(const rz::Scenario& s, const rz::DelayVector& after,
                            const rz::EngineConfig& cfg, const std::string& algorithm,
                            const std::string& label, std::optional<std::int64_t> regs,
                            double runtime_ms, bool timing) {
  rz::ReportRecord r = rz::summarize(s, rz::DelayVector(s.num_flights()), after, cfg, regs);
  r.algorithm = algorithm;
  r.scenario = label;
  r.runtime_ms = timing ? runtime_ms : 0.0;
  return r;
}

template <class P>
void validate_config(const P& p) {
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

int report_error(const std::string& kind, int code, const std::string& message) {
  json e = {{"error", kind}, {"exit_code", code}, {"message", message}};
  std::cerr << e.dump() << std::endl;
  return code;
}

void on_signal(int) { rz::stop_server(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demand-capacity balancing planner"};
  app.set_version_flag("--version", RZ_VERSION);
  app.require_subcommand(1);

  Common common;
  rz::SearchParams search;
  rz::SaParams sa;
  rz::GaParams ga;
  rz::GeneratorParams gen;

  // gen
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a synthetic scenario as CSV");
  add_common(gen_cmd, common);
  opt(gen_cmd, "num-flights", gen.num_flights, "Flights (generator)");
  opt(gen_cmd, "num-volumes", gen.num_volumes, "Traffic volumes (generator)");
  opt(gen_cmd, "num-routes", gen.num_routes, "Route templates (generator)");
  opt(gen_cmd, "capacity-ratio-min", gen.capacity_ratio_min, "Capacity over own peak demand, low");
  opt(gen_cmd, "capacity-ratio-max", gen.capacity_ratio_max, "Capacity over own peak demand, high");
  opt(gen_cmd, "num-dips", gen.num_dips, "Random capacity dips");

  CLI::App* plan_cmd = app.add_subcommand("plan", "Run the tree search and commit a plan");
  add_common(plan_cmd, common);
  add_search(plan_cmd, search);

  std::string algorithm;
  CLI::App* base_cmd = app.add_subcommand("baseline", "Run SA, NSGA-II or greedy capping");
  add_common(base_cmd, common);
  base_cmd->add_option("algorithm", algorithm, "sa | ga | greedy")
      ->required()
      ->check(CLI::IsMember({"sa", "ga", "greedy"}));
  add_sa(base_cmd, sa);
  add_ga(base_cmd, ga);
  opt(base_cmd, "baseline-seed", sa.seed, "Seed for SA and NSGA-II");
  int greedy_iterations = 200;
  opt(base_cmd, "greedy-max-iterations", greedy_iterations, "Greedy capping iteration cap");

  std::vector<int> ablate_hotspots = {20, 5};
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Tree search against BRPP and fewer hotspots");
  add_common(ablate_cmd, common);
  add_search(ablate_cmd, search);
  opt(ablate_cmd, "hotspot-limits", ablate_hotspots, "max_hotspots_per_node values to compare")
      ->delimiter(',');

  int study_scenarios = 0;
  int study_min_flows = 500;
  rz::StudyParams study;
  CLI::App* study_cmd = app.add_subcommand("heuristic-study", "Heuristics against rate-optimal relief");
  add_common(study_cmd, common);
  opt(study_cmd, "min-flows", study_min_flows, "With no scenario given, generate until this many flows");
  opt(study_cmd, "max-scenarios", study_scenarios, "Generated scenario cap; 0 means 100");
  opt(study_cmd, "max-rate", study.max_rate, "Upper end of the rate grid");
  opt(study_cmd, "flows-threshold", study.extraction.similarity_threshold, "Jaccard edge threshold");
  opt(study_cmd, "flows-resolution", study.extraction.resolution, "Community detection resolution");

  std::vector<double> w_caps = {2, 4, 6, 8, 10};
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Plan at several exceedance weights");
  add_common(sweep_cmd, common);
  add_search(sweep_cmd, search);
  opt(sweep_cmd, "w-caps", w_caps, "Exceedance weights")->delimiter(',');

  rz::ServerOptions server;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Start the what-if HTTP service");
  add_common(serve_cmd, common);
  add_search(serve_cmd, search);
  opt(serve_cmd, "host", server.host, "Bind address");
  opt(serve_cmd, "port", server.port, "Port; 0 picks a free one");
  opt(serve_cmd, "cors-origin", server.cors_origin, "Access-Control-Allow-Origin value");

  std::string plan_file;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Replay a plan file and report it");
  add_common(eval_cmd, common);
  opt(eval_cmd, "plan", plan_file, "Plan JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", kExitConfig, e.what());
  }

  try {
    omp_set_num_threads(common.threads);
    const rz::EngineConfig cfg = common.engine();
    const bool timing = !common.no_timing;
    const double budget_s = common.max_minutes * 60.0;
    if (common.w_cap < 0 || common.w_delay < 0 || common.max_delay < 0) {
      throw ConfigError("weights and delay cap must be non-negative");
    }

    if (*gen_cmd) {
      gen.seed = common.scenario_seed;
      validate_config(gen);
      const rz::Scenario s = common.preset.empty() ? rz::generate(gen) : load(common);
      const fs::path dir = out_dir(common);
      rz::save_scenario(s, dir / "flights.csv", dir / "capacities.csv");
      write_manifest(dir, gen_cmd, "gen", {{"flights", s.num_flights()}, {"volumes", s.num_volumes()}});
      std::cout << "wrote " << s.num_flights() << " flights, " << s.num_volumes() << " volumes to "
                << dir.string() << "\n";
      return 0;
    }

    if (*plan_cmd) {
      search.max_seconds = budget_s;
      validate_config(search);
      const rz::Scenario s = load(common);
      const fs::path dir = out_dir(common);
      const rz::SearchResult r = rz::run_search(s, search, cfg, nullptr, timing);
      rz::save_plan(s, rz::to_document(r.plan, "mcts"), dir / "plan.json");
      write_file(dir / "runlog.csv", r.log.to_csv(timing));
      write_report(dir, "report",
                   report_for(s, r.plan.delays, cfg, "mcts", scenario_label(common),
                              static_cast<std::int64_t>(r.plan.regulations.size()),
                              r.stats.elapsed_ms, timing));
      write_manifest(dir, plan_cmd, "plan", {{"seed", search.seed}});
      std::cout << "mcts delta_j " << r.plan.total_delta_j() << " regulations "
                << r.plan.regulations.size() << "\n";
      return 0;
    }

    if (*base_cmd) {
      ga.seed = sa.seed;
      sa.max_seconds = budget_s;
      ga.max_seconds = budget_s;
      sa.max_delay = cfg.max_delay_per_flight_min;
      ga.max_delay = cfg.max_delay_per_flight_min;
      validate_config(sa);
      validate_config(ga);
      const rz::Scenario s = load(common);
      const fs::path dir = out_dir(common);
      rz::Stopwatch clock;
      const std::string label = scenario_label(common);
      if (algorithm == "sa") {
        const rz::SaResult r = rz::run_sa(s, sa, cfg, timing);
        write_file(dir / "runlog.csv", r.log.to_csv(timing));
        write_file(dir / "delays.csv", delays_csv(s, r.delays));
        write_report(dir, "report", report_for(s, r.delays, cfg, "sa", label, std::nullopt,
                                               clock.elapsed_ms(), timing));
        std::cout << "sa delta_j " << r.baseline.j_total - r.objective.j_total << "\n";
      } else if (algorithm == "ga") {
        const rz::GaResult r = rz::run_nsga2(s, ga, cfg, timing);
        write_file(dir / "runlog.csv", r.log.to_csv(timing));
        write_file(dir / "delays.csv", delays_csv(s, r.selected.delays));
        std::ostringstream archive;
        archive << "j_cap,j_delay,j_total\n";
        for (const rz::GaIndividual& g : r.archive) {
          archive << g.objective.j_cap << ',' << g.objective.j_delay << ',' << g.objective.j_total << '\n';
        }
        write_file(dir / "archive.csv", archive.str());
        write_report(dir, "report", report_for(s, r.selected.delays, cfg, "ga", label, std::nullopt,
                                               clock.elapsed_ms(), timing));
        std::cout << "ga delta_j " << r.baseline.j_total - r.selected.objective.j_total << "\n";
      } else {
        const rz::GreedyResult r = rz::run_greedy_capping(s, cfg, greedy_iterations, timing);
        write_file(dir / "runlog.csv", r.log.to_csv(timing));
        rz::save_plan(s, rz::to_document(r.plan, "greedy"), dir / "plan.json");
        write_report(dir, "report",
                     report_for(s, r.plan.delays, cfg, "greedy", label,
                                static_cast<std::int64_t>(r.plan.regulations.size()),
                                clock.elapsed_ms(), timing));
        std::cout << "greedy delta_j " << r.plan.total_delta_j() << "\n";
      }
      write_manifest(dir, base_cmd, "baseline", {{"algorithm", algorithm}, {"seed", sa.seed}});
      return 0;
    }

    if (*ablate_cmd) {
      search.max_seconds = budget_s;
      validate_config(search);
      if (ablate_hotspots.empty()) throw ConfigError("--hotspot-limits must not be empty");
      const rz::Scenario s = load(common);
      const fs::path dir = out_dir(common);
      const std::string label = scenario_label(common);
      std::ostringstream table;
      table << rz::ReportRecord::csv_header() << "\n";
      std::size_t budget = 1;
      for (std::size_t i = 0; i < ablate_hotspots.size(); ++i) {
        rz::SearchParams p = search;
        p.max_hotspots_per_node = ablate_hotspots[i];
        validate_config(p);
        const rz::SearchResult r = rz::run_search(s, p, cfg, nullptr, timing);
        const std::string name = "rz-h" + std::to_string(p.max_hotspots_per_node);
        write_file(dir / ("runlog_" + name + ".csv"), r.log.to_csv(timing));
        table << report_for(s, r.plan.delays, cfg, name, label,
                            static_cast<std::int64_t>(r.plan.regulations.size()),
                            r.stats.elapsed_ms, timing)
                     .to_csv_row()
              << "\n";
        if (i == 0) budget = std::max<std::size_t>(1, r.plan.regulations.size());
      }
      const rz::SearchResult b =
          rz::brpp(s, static_cast<int>(budget), search.proposals, cfg, nullptr, timing);
      write_file(dir / "runlog_brpp.csv", b.log.to_csv(timing));
      table << report_for(s, b.plan.delays, cfg, "brpp", label,
                          static_cast<std::int64_t>(b.plan.regulations.size()), b.stats.elapsed_ms,
                          timing)
                   .to_csv_row()
            << "\n";
      write_file(dir / "ablation.csv", table.str());
      write_manifest(dir, ablate_cmd, "ablate", {{"seed", search.seed}, {"brpp_budget", budget}});
      std::cout << table.str();
      return 0;
    }

    if (*study_cmd) {
      validate_config(study.extraction);
      if (study.max_rate < 1) throw ConfigError("--max-rate must be >= 1");
      std::vector<rz::FlowStudyRow> rows;
      if (!common.preset.empty() || !common.flights.empty()) {
        const rz::Scenario s = load(common);
        rows = rz::heuristic_study(s, scenario_label(common), study, cfg);
      } else {
        const int cap = study_scenarios > 0 ? study_scenarios : 100;
        for (int i = 0; i < cap && static_cast<int>(rows.size()) < study_min_flows; ++i) {
          const std::uint64_t seed = common.scenario_seed + static_cast<std::uint64_t>(i);
          const rz::Scenario s = rz::generate_preset("default", seed);
          auto more = rz::heuristic_study(s, "default#" + std::to_string(seed), study, cfg);
          rows.insert(rows.end(), more.begin(), more.end());
        }
      }
      std::vector<double> nomrel, inload, scoped, network;
      for (const rz::FlowStudyRow& r : rows) {
        nomrel.push_back(r.nomrel);
        inload.push_back(r.inload);
        scoped.push_back(static_cast<double>(r.scoped_relief));
        network.push_back(static_cast<double>(r.network_relief));
      }
      const fs::path dir = out_dir(common);
      std::ostringstream csv;
      rz::write_study_csv(csv, rows);
      write_file(dir / "study.csv", csv.str());
      const json summary = {{"flows", rows.size()},
                            {"spearman_nomrel_scoped", rz::spearman(nomrel, scoped)},
                            {"spearman_nomrel_network", rz::spearman(nomrel, network)},
                            {"spearman_inload_network", rz::spearman(inload, network)}};
      write_file(dir / "summary.json", summary.dump(2) + "\n");
      write_manifest(dir, study_cmd, "heuristic-study");
      std::cout << summary.dump() << "\n";
      return 0;
    }

    if (*sweep_cmd) {
      search.max_seconds = budget_s;
      validate_config(search);
      const rz::Scenario s = load(common);
      const fs::path dir = out_dir(common);
      std::ostringstream csv;
      csv << "w_cap,regulation_count,j_cap_before,j_cap_after,j_delay_after,delta_j,"
             "exceedance_reduced,total_delay_min,flights_delayed\n";
      for (double w : w_caps) {
        if (w < 0) throw ConfigError("--w-caps values must be non-negative");
        rz::EngineConfig c = cfg;
        c.weights.w_cap = w;
        const rz::SearchResult r = rz::run_search(s, search, c, nullptr, timing);
        std::ostringstream tag;
        tag << w;
        write_file(dir / ("runlog_wcap" + tag.str() + ".csv"), r.log.to_csv(timing));
        const rz::ReportRecord rep = rz::summarize(s, rz::DelayVector(s.num_flights()), r.plan.delays, c);
        csv << tag.str() << ',' << r.plan.regulations.size() << ',' << rep.before.j_cap << ','
            << rep.after.j_cap << ',' << rep.after.j_delay << ',' << rep.delta_j << ','
            << rep.exceedance_reduced << ',' << rep.total_delay_min << ',' << rep.flights_delayed
            << '\n';
      }
      write_file(dir / "frontier.csv", csv.str());
      write_manifest(dir, sweep_cmd, "sweep", {{"seed", search.seed}});
      std::cout << csv.str();
      return 0;
    }

    if (*serve_cmd) {
      validate_config(search);
      auto s = std::make_shared<const rz::Scenario>(load(common));
      rz::WhatIfService service(cfg, search);
      service.add_session(s, "default");
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const bool ok = rz::serve(service, server, [&](int port) {
        std::cout << "listening on http://" << server.host << ":" << port << std::endl;
      });
      if (!ok) throw std::runtime_error("cannot bind " + server.host + ":" + std::to_string(server.port));
      return 0;
    }

    if (*eval_cmd) {
      const rz::Scenario s = load(common);
      rz::PlanDocument doc;
      try {
        doc = rz::load_plan(s, plan_file);
      } catch (const std::exception& e) {
        throw DataError(e.what());
      }
      const rz::Plan p = rz::build_plan(s, doc.regulations, cfg);
      rz::ReportRecord rep = rz::summarize(s, rz::DelayVector(s.num_flights()), p.delays, cfg,
                                           static_cast<std::int64_t>(p.regulations.size()));
      rep.algorithm = doc.algorithm.empty() ? "eval" : doc.algorithm;
      rep.scenario = scenario_label(common);
      std::cout << rep.to_json() << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    return report_error("config", kExitConfig, e.what());
  } catch (const DataError& e) {
    return report_error("data", kExitData, e.what());
  } catch (const std::exception& e) {
    return report_error("runtime", kExitRuntime, e.what());
  }
  return 0;
}
