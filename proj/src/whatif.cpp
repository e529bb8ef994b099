#include "rz/whatif.hpp"

#include <algorithm>
#include <regex>

#include "rz/flows.hpp"
#include "rz/heuristics.hpp"
#include "rz/metrics.hpp"

namespace rz {

using nlohmann::json;

namespace {

std::uint64_t fnv(std::uint64_t h, std::int64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= static_cast<std::uint64_t>(v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t state_hash_of(const std::vector<Regulation>& regs, const DelayVector& delays) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv(h, static_cast<std::int64_t>(regs.size()));
  for (const Regulation& r : regs) {
    h = fnv(h, r.cv);
    h = fnv(h, r.t_start);
    h = fnv(h, r.t_end);
    h = fnv(h, r.rate_per_hour);
    h = fnv(h, r.anchor_margin_bins);
    h = fnv(h, static_cast<std::int64_t>(r.members.size()));
    for (FlightIdx f : r.members) h = fnv(h, f);
  }
  for (int d : delays.values()) h = fnv(h, d);
  return h;
}

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

json objective_json(const ObjectiveBreakdown& o) {
  return {{"j_cap", o.j_cap}, {"j_delay", o.j_delay}, {"j_total", o.j_total}};
}

json hotspot_json(const Scenario& scenario, const Hotspot& h, const DemandGrid& demand) {
  const int w = scenario.grid().bin_width_min;
  return {{"id", hotspot_id(scenario, h)},
          {"tv_id", scenario.volume_name(h.tv)},
          {"t_start", h.t_start},
          {"t_end", h.t_end},
          {"start_min", h.t_start * w},
          {"end_min", (h.t_end + 1) * w},
          {"severity", severity(h, demand)}};
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ApiError(400, "bad_request", std::string("malformed JSON: ") + e.what());
  }
}

int int_field(const json& body, const char* name, int fallback) {
  if (!body.contains(name)) return fallback;
  if (!body[name].is_number_integer()) {
    throw ApiError(400, "bad_request", std::string(name) + " must be an integer");
  }
  return body[name].get<int>();
}

}  // namespace

std::string hotspot_id(const Scenario& scenario, const Hotspot& h) {
  return scenario.volume_name(h.tv) + ":" + std::to_string(h.t_start) + "-" +
         std::to_string(h.t_end);
}

Regulation regulation_from_json(const Scenario& scenario, const DelayVector& delays,
                                 const json& body) {
  const json& j = body.contains("regulation") ? body["regulation"] : body;
  if (!j.is_object()) throw ApiError(400, "invalid_regulation", "regulation must be an object");
  Regulation r;
  try {
    const std::string tv = j.at("tv_id").get<std::string>();
    const auto v = scenario.find_volume(tv);
    if (!v) throw ApiError(400, "invalid_regulation", "unknown volume " + tv);
    r.cv = *v;
    r.t_start = j.at("t_start").get<int>();
    r.t_end = j.at("t_end").get<int>();
    r.rate_per_hour = j.at("rate_per_hour").get<int>();
    r.anchor_margin_bins = j.value("anchor_margin_bins", 0);
    if (j.contains("members")) {
      for (const auto& m : j.at("members")) {
        const std::string id = m.get<std::string>();
        const auto f = scenario.find_flight(id);
        if (!f) throw ApiError(400, "invalid_regulation", "unknown flight " + id);
        r.members.push_back(*f);
      }
    } else if (r.t_start >= 0 && r.t_end >= r.t_start && r.t_end < scenario.grid().num_bins) {
      for (const RegulatedFlight& rf : window_flights(scenario, delays, r.cv, r.t_start, r.t_end)) {
        r.members.push_back(rf.flight);
      }
    }
  } catch (const json::exception& e) {
    throw ApiError(400, "invalid_regulation", e.what());
  }
  r.normalize();
  try {
    r.validate(scenario);
  } catch (const std::exception& e) {
    throw ApiError(400, "invalid_regulation", e.what());
  }
  return r;
}

json regulation_to_json(const Scenario& scenario, const Regulation& reg) {
  json members = json::array();
  for (FlightIdx f : reg.members) members.push_back(scenario.flight(f).id);
  const int w = scenario.grid().bin_width_min;
  return {{"tv_id", scenario.volume_name(reg.cv)},
          {"t_start", reg.t_start},
          {"t_end", reg.t_end},
          {"start_min", reg.t_start * w},
          {"end_min", (reg.t_end + 1) * w},
          {"rate_per_hour", reg.rate_per_hour},
          {"anchor_margin_bins", reg.anchor_margin_bins},
          {"descriptor", reg.descriptor(scenario)},
          {"members", members}};
}

WhatIfSession::WhatIfSession(std::string id, std::shared_ptr<const Scenario> scenario,
                             EngineConfig config, SearchParams search)
    : id_(std::move(id)), scenario_(std::move(scenario)), config_(config), search_(std::move(search)) {
  baseline_demand_ = build_demand(*scenario_, DelayVector(scenario_->num_flights()));
  current_ = make_snapshot({}, 0);
}

std::shared_ptr<const SessionSnapshot> WhatIfSession::make_snapshot(std::vector<Regulation> regs,
                                                                    std::int64_t version) const {
  auto s = std::make_shared<SessionSnapshot>();
  s->plan = build_plan(*scenario_, regs, config_);
  s->regulations = std::move(regs);
  s->demand = build_demand(*scenario_, s->plan.delays);
  s->hotspots = detect_hotspots(s->demand);
  s->version = version;
  s->hash = state_hash_of(s->regulations, s->plan.delays);
  return s;
}

std::shared_ptr<const SessionSnapshot> WhatIfSession::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void WhatIfSession::check_version(const json& body, const SessionSnapshot& current) const {
  if (!body.contains("expected_version")) return;
  if (!body["expected_version"].is_number_integer()) {
    throw ApiError(400, "bad_request", "expected_version must be an integer");
  }
  if (body["expected_version"].get<std::int64_t>() != current.version) {
    throw ApiError(409, "version_conflict",
                   "session is at version " + std::to_string(current.version));
  }
}

json WhatIfSession::summary(const SessionSnapshot& s) const {
  return {{"session", id_},
          {"version", s.version},
          {"state_hash", hex(s.hash)},
          {"regulation_count", s.regulations.size()},
          {"baseline", objective_json(s.plan.baseline)},
          {"objective", objective_json(s.plan.final_objective())},
          {"delta_j", s.plan.total_delta_j()},
          {"hotspot_count", s.hotspots.size()}};
}

json WhatIfSession::hotspots() const {
  const auto s = snapshot();
  json list = json::array();
  std::vector<Hotspot> hs = s->hotspots;
  std::stable_sort(hs.begin(), hs.end(), [&](const Hotspot& a, const Hotspot& b) {
    return severity(a, s->demand) > severity(b, s->demand);
  });
  for (const Hotspot& h : hs) list.push_back(hotspot_json(*scenario_, h, s->demand));
  return {{"version", s->version}, {"state_hash", hex(s->hash)}, {"hotspots", list}};
}

json WhatIfSession::occupancy(const std::string& tv) const {
  const auto v = scenario_->find_volume(tv);
  if (!v) throw ApiError(404, "unknown_volume", "unknown volume " + tv);
  const auto s = snapshot();
  const int nb = scenario_->grid().num_bins;
  json bins = json::array();
  json start_min = json::array();
  for (int t = 0; t < nb; ++t) {
    bins.push_back(t);
    start_min.push_back(t * scenario_->grid().bin_width_min);
  }
  auto row = [](std::span<const int> r) { return json(std::vector<int>(r.begin(), r.end())); };
  return {{"tv_id", tv},
          {"version", s->version},
          {"bins", bins},
          {"start_min", start_min},
          {"capacity", row(scenario_->capacities().row(*v))},
          {"demand_before", row(baseline_demand_.demand_row(*v))},
          {"excess_before", row(baseline_demand_.excess_row(*v))},
          {"demand_after", row(s->demand.demand_row(*v))},
          {"excess_after", row(s->demand.excess_row(*v))}};
}

json WhatIfSession::flows(const std::string& hotspot) const {
  const auto s = snapshot();
  const auto it = std::find_if(s->hotspots.begin(), s->hotspots.end(), [&](const Hotspot& h) {
    return hotspot_id(*scenario_, h) == hotspot;
  });
  if (it == s->hotspots.end()) throw ApiError(404, "unknown_hotspot", "no current hotspot " + hotspot);
  const FlowExtraction ex = extract_flows(*it, *scenario_, s->plan.delays, search_.proposals.extraction);
  std::vector<FlowScore> scores;
  for (const Flow& f : ex.flows) {
    scores.push_back(score_flow(f, s->demand, scenario_->capacities(), search_.proposals.priority));
  }
  json list = json::array();
  for (std::size_t i : rank_flows(ex.flows, scores)) {
    const Flow& f = ex.flows[i];
    json members = json::array();
    for (FlightIdx m : f.members) members.push_back(scenario_->flight(m).id);
    json footprint = json::array();
    for (VolumeIdx v : f.footprint) footprint.push_back(scenario_->volume_name(v));
    list.push_back({{"flow_id", f.id},
                    {"nomrel", scores[i].nomrel},
                    {"inload", scores[i].inload},
                    {"priority", scores[i].priority},
                    {"members", members},
                    {"footprint", footprint}});
  }
  return {{"hotspot", hotspot_json(*scenario_, *it, s->demand)},
          {"version", s->version},
          {"flows", list}};
}

json WhatIfSession::evaluate(const json& body) const {
  const auto s = snapshot();
  const Regulation reg = regulation_from_json(*scenario_, s->plan.delays, body);
  const DelayVector after =
      apply_regulation(*scenario_, s->plan.delays, reg, config_.max_delay_per_flight_min);
  const DemandGrid demand = build_demand(*scenario_, after);
  const ObjectiveBreakdown before = s->plan.final_objective();
  const ObjectiveBreakdown next = objective(demand, after, config_.weights);

  std::vector<std::string> old_ids;
  std::vector<std::string> new_ids;
  for (const Hotspot& h : s->hotspots) old_ids.push_back(hotspot_id(*scenario_, h));
  for (const Hotspot& h : detect_hotspots(demand)) new_ids.push_back(hotspot_id(*scenario_, h));
  std::sort(old_ids.begin(), old_ids.end());
  std::sort(new_ids.begin(), new_ids.end());
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::set_difference(new_ids.begin(), new_ids.end(), old_ids.begin(), old_ids.end(),
                      std::back_inserter(added));
  std::set_difference(old_ids.begin(), old_ids.end(), new_ids.begin(), new_ids.end(),
                      std::back_inserter(removed));

  json delays = json::array();
  for (FlightIdx f = 0; f < scenario_->num_flights(); ++f) {
    if (after[f] == s->plan.delays[f]) continue;
    delays.push_back({{"flight_id", scenario_->flight(f).id},
                      {"delay_min", after[f]},
                      {"added_min", after[f] - s->plan.delays[f]}});
  }
  return {{"version", s->version},
          {"state_hash", hex(s->hash)},
          {"regulation", regulation_to_json(*scenario_, reg)},
          {"delta_j", before.j_total - next.j_total},
          {"delta_j_cap", before.j_cap - next.j_cap},
          {"delta_j_delay", before.j_delay - next.j_delay},
          {"before", objective_json(before)},
          {"after", objective_json(next)},
          {"hotspots_added", added},
          {"hotspots_removed", removed},
          {"delays", delays}};
}

json WhatIfSession::commit(const json& body) {
  std::unique_lock lock(mutation_mutex_, std::try_to_lock);
  if (!lock.owns_lock()) throw ApiError(409, "mutation_in_progress", "another mutation is running");
  const auto s = snapshot();
  check_version(body, *s);
  const Regulation reg = regulation_from_json(*scenario_, s->plan.delays, body);
  std::vector<Regulation> regs = s->regulations;
  regs.push_back(reg);
  auto next = make_snapshot(std::move(regs), s->version + 1);
  json out = summary(*next);
  out["step_delta_j"] = next->plan.delta_j.back();
  out["regulation"] = regulation_to_json(*scenario_, reg);
  {
    std::lock_guard guard(snapshot_mutex_);
    undo_stack_.push_back(current_);
    current_ = std::move(next);
  }
  return out;
}

json WhatIfSession::undo(const json& body) {
  std::unique_lock lock(mutation_mutex_, std::try_to_lock);
  if (!lock.owns_lock()) throw ApiError(409, "mutation_in_progress", "another mutation is running");
  const auto s = snapshot();
  check_version(body, *s);
  std::lock_guard guard(snapshot_mutex_);
  if (undo_stack_.empty()) throw ApiError(409, "nothing_to_undo", "the plan is empty");
  // Same state as before the commit, under a fresh version number.
  auto restored = std::make_shared<SessionSnapshot>(*undo_stack_.back());
  undo_stack_.pop_back();
  restored->version = s->version + 1;
  current_ = std::move(restored);
  return summary(*current_);
}

json WhatIfSession::suggest(const json& body) {
  const auto s = snapshot();
  SearchParams p = search_;
  p.sims = int_field(body, "sims", 32);
  p.depth = int_field(body, "depth", 8);
  const int top_k = int_field(body, "top_k", 5);
  if (body.contains("seed")) p.seed = static_cast<std::uint64_t>(int_field(body, "seed", 0));
  if (p.sims < 1 || p.sims > 100000 || p.depth < 1 || p.depth > 256 || top_k < 1) {
    throw ApiError(400, "bad_request", "sims, depth and top_k must be positive and bounded");
  }
  p.commit_depth = p.depth;
  cancel_.store(false);
  MctsPlanner planner(*scenario_, p, config_, s->plan.delays);
  planner.simulate(p.sims, p.max_seconds, &cancel_);
  std::vector<RootChoice> choices = planner.root_choices();
  std::stable_sort(choices.begin(), choices.end(), [](const RootChoice& a, const RootChoice& b) {
    if (a.visits != b.visits) return a.visits > b.visits;
    if (a.q != b.q) return a.q > b.q;
    return a.prior > b.prior;
  });
  json list = json::array();
  for (const RootChoice& c : choices) {
    if (c.visits == 0 || static_cast<int>(list.size()) >= top_k) break;
    list.push_back({{"hotspot_id", hotspot_id(*scenario_, c.hotspot)},
                    {"regulation", regulation_to_json(*scenario_, c.proposal.regulation)},
                    {"delta_j", c.proposal.delta_j},
                    {"prior", c.prior},
                    {"hotspot_prior", c.hotspot_prior},
                    {"visits", c.visits},
                    {"q", c.q}});
  }
  return {{"version", s->version},
          {"simulations", planner.stats().simulations},
          {"cancelled", cancel_.load()},
          {"suggestions", list}};
}

json WhatIfSession::plan() const {
  const auto s = snapshot();
  json regs = json::array();
  for (std::size_t i = 0; i < s->regulations.size(); ++i) {
    json r = regulation_to_json(*scenario_, s->regulations[i]);
    r["delta_j"] = s->plan.delta_j[i];
    r["after"] = objective_json(s->plan.after[i]);
    regs.push_back(std::move(r));
  }
  ReportRecord report = summarize(*scenario_, DelayVector(scenario_->num_flights()), s->plan.delays,
                                  config_, static_cast<std::int64_t>(s->regulations.size()));
  report.algorithm = "whatif";
  report.scenario = id_;
  json out = summary(*s);
  out["regulations"] = regs;
  out["report"] = json::parse(report.to_json());
  return out;
}

WhatIfService::WhatIfService(EngineConfig config, SearchParams search)
    : config_(config), search_(std::move(search)) {}

std::shared_ptr<WhatIfSession> WhatIfService::add_session(std::shared_ptr<const Scenario> scenario,
                                                          std::string id) {
  std::unique_lock lock(sessions_mutex_);
  if (id.empty()) {
    do {
      id = "s" + std::to_string(next_id_++);
    } while (sessions_.count(id));
  }
  if (sessions_.count(id)) throw ApiError(409, "session_exists", "session " + id + " exists");
  auto s = std::make_shared<WhatIfSession>(id, std::move(scenario), config_, search_);
  sessions_[id] = s;
  if (default_id_.empty()) default_id_ = id;
  return s;
}

std::shared_ptr<WhatIfSession> WhatIfService::session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const std::string& key = id.empty() ? default_id_ : id;
  const auto it = sessions_.find(key);
  if (it == sessions_.end()) throw ApiError(404, "unknown_session", "unknown session " + key);
  return it->second;
}

std::vector<std::string> WhatIfService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

std::pair<int, json> WhatIfService::handle(const std::string& method, const std::string& path,
                                           const std::string& session_id, const std::string& body) {
  static const std::regex occupancy_re("^/api/volumes/([^/]+)/occupancy$");
  static const std::regex flows_re("^/api/hotspots/([^/]+)/flows$");
  try {
    std::smatch m;
    if (method == "GET" && path == "/api/sessions") {
      return {200, {{"sessions", session_ids()}, {"default", default_id_}}};
    }
    const std::shared_ptr<WhatIfSession> s = session(session_id);
    if (method == "GET") {
      if (path == "/api/hotspots") return {200, s->hotspots()};
      if (path == "/api/plan") return {200, s->plan()};
      if (std::regex_match(path, m, occupancy_re)) return {200, s->occupancy(m[1].str())};
      if (std::regex_match(path, m, flows_re)) return {200, s->flows(m[1].str())};
    } else if (method == "POST") {
      const json j = parse_body(body);
      if (path == "/api/proposals/evaluate") return {200, s->evaluate(j)};
      if (path == "/api/plan/commit") return {200, s->commit(j)};
      if (path == "/api/plan/undo") return {200, s->undo(j)};
      if (path == "/api/search/suggest") {
        return {200, with_search_slot([&] { return s->suggest(j); })};
      }
      if (path == "/api/search/cancel") {
        s->cancel_search();
        return {200, {{"cancelled", true}}};
      }
    }
    throw ApiError(404, "not_found", method + " " + path);
  } catch (const ApiError& e) {
    return {e.status(), {{"error", {{"code", e.code()}, {"message", e.what()}}}}};
  } catch (const std::exception& e) {
    return {500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}};
  }
}

}  // namespace rz
