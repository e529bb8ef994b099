#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rz/fpfs.hpp"
#include "rz/mcts.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

/// Error with an HTTP status and a short machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

/// Hotspot id as used in URLs, e.g. `TV03:40-43`.
std::string hotspot_id(const Scenario& scenario, const Hotspot& h);

/// Regulation from a request body. Throws ApiError 400 on malformed input.
/// Without `members`, every flight entering the window at the volume is targeted.
Regulation regulation_from_json(const Scenario& scenario, const DelayVector& delays,
                                 const nlohmann::json& body);
nlohmann::json regulation_to_json(const Scenario& scenario, const Regulation& reg);

/// One immutable planning state. Reads work on a snapshot without locking.
struct SessionSnapshot {
  std::vector<Regulation> regulations;
  Plan plan;
  DemandGrid demand;
  std::vector<Hotspot> hotspots;
  std::int64_t version = 0;
  std::uint64_t hash = 0;
};

/// One scenario plus the plan built on it. Mutations are serialized; a
/// mutation that finds another in progress, or a stale `expected_version`,
/// fails with 409.
class WhatIfSession {
 public:
  WhatIfSession(std::string id, std::shared_ptr<const Scenario> scenario, EngineConfig config = {},
                SearchParams search = {});

  const std::string& id() const { return id_; }
  const Scenario& scenario() const { return *scenario_; }
  std::shared_ptr<const SessionSnapshot> snapshot() const;
  std::uint64_t state_hash() const { return snapshot()->hash; }

  nlohmann::json hotspots() const;
  nlohmann::json occupancy(const std::string& tv) const;
  nlohmann::json flows(const std::string& hotspot) const;
  /// Dry run: never changes the session.
  nlohmann::json evaluate(const nlohmann::json& body) const;
  nlohmann::json commit(const nlohmann::json& body);
  nlohmann::json undo(const nlohmann::json& body);
  /// Bounded search from the current state; top-k root proposals by visits.
  nlohmann::json suggest(const nlohmann::json& body);
  /// Stops a running suggest; it returns whatever it has searched so far.
  void cancel_search() { cancel_.store(true); }
  nlohmann::json plan() const;

 private:
  std::shared_ptr<const SessionSnapshot> make_snapshot(std::vector<Regulation> regs,
                                                       std::int64_t version) const;
  void check_version(const nlohmann::json& body, const SessionSnapshot& current) const;
  nlohmann::json summary(const SessionSnapshot& s) const;

  std::string id_;
  std::shared_ptr<const Scenario> scenario_;
  EngineConfig config_;
  SearchParams search_;
  DemandGrid baseline_demand_;

  mutable std::mutex snapshot_mutex_;  // guards the pointer swap only
  std::shared_ptr<const SessionSnapshot> current_;
  std::vector<std::shared_ptr<const SessionSnapshot>> undo_stack_;
  std::mutex mutation_mutex_;
  std::atomic<bool> cancel_{false};
};

/// Session registry plus the single search worker slot shared by all sessions.
class WhatIfService {
 public:
  explicit WhatIfService(EngineConfig config = {}, SearchParams search = {});

  /// Registers a session; an empty id picks the next free `sN`.
  std::shared_ptr<WhatIfSession> add_session(std::shared_ptr<const Scenario> scenario,
                                             std::string id = {});
  /// Throws ApiError 404 for an unknown id.
  std::shared_ptr<WhatIfSession> session(const std::string& id) const;
  std::vector<std::string> session_ids() const;
  const std::string& default_session() const { return default_id_; }

  /// Runs `fn` on the search worker; 409 when it is already busy.
  template <class Fn>
  auto with_search_slot(Fn&& fn) {
    if (!search_slot_.try_acquire()) throw ApiError(409, "search_busy", "a search is already running");
    struct Release {
      std::binary_semaphore& s;
      ~Release() { s.release(); }
    } release{search_slot_};
    return fn();
  }

  /// Dispatches one request. `path` excludes the query string; `session`
  /// may be empty for the default session. Returns (status, JSON body).
  std::pair<int, nlohmann::json> handle(const std::string& method, const std::string& path,
                                        const std::string& session, const std::string& body);

 private:
  EngineConfig config_;
  SearchParams search_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<WhatIfSession>> sessions_;
  std::string default_id_;
  int next_id_ = 0;
  std::binary_semaphore search_slot_{1};
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

/// Blocking HTTP server; returns when stop_server is called or binding fails.
/// `on_bound` receives the actual port (useful with port 0).
bool serve(WhatIfService& service, const ServerOptions& options,
           const std::function<void(int)>& on_bound = {});
void stop_server();

}  // namespace rz
