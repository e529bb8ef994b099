#include <atomic>

#include <httplib.h>

#include "rz/whatif.hpp"

namespace rz {

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

}  // namespace

bool serve(WhatIfService& service, const ServerOptions& options,
           const std::function<void(int)>& on_bound) {
  httplib::Server server;
  server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});

  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    const std::string session = req.has_param("session") ? req.get_param_value("session") : "";
    auto [status, body] = service.handle(req.method, req.path, session, req.body);
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", dispatch);
  server.Post(R"(/api/.*)", dispatch);
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port < 0) return false;
  } else if (!server.bind_to_port(options.host, port)) {
    return false;
  }
  g_server.store(&server);
  if (on_bound) on_bound(port);
  const bool ok = server.listen_after_bind();
  g_server.store(nullptr);
  return ok;
}

void stop_server() {
  if (httplib::Server* s = g_server.load()) s->stop();
}

}  // namespace rz
