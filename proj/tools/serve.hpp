#pragma once

// HTTP transport for matern::service. Handlers hold no mutable state, so the
// server's worker pool runs them concurrently.

#include <httplib.h>

#include <cstdlib>
#include <ostream>
#include <string>

#include "matern/service.hpp"

namespace matern::tools {

inline void install_routes(httplib::Server& server) {
  const auto handler = [](const httplib::Request& req, httplib::Response& res) {
    service::Query query;
    for (const auto& [key, value] : req.params) query.emplace(key, value);  // first occurrence wins
    const service::Response r = service::handle(req.path, query);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    if (r.status == 200) res.set_header("Cache-Control", "public, max-age=3600");
    res.set_content(r.body, r.content_type);
  };
  for (const char* path : {"/health", "/surface", "/swapdiff", "/parts"}) server.Get(path, handler);
}

/// Default port from MATERN_PORT, else 8080.
inline int default_port() {
  if (const char* env = std::getenv("MATERN_PORT")) {
    try {
      const int p = std::stoi(env);
      if (p > 0 && p < 65536) return p;
    } catch (const std::exception&) {
    }
  }
  return 8080;
}

inline int serve_forever(const std::string& host, int port, std::ostream& log) {
  httplib::Server server;
  install_routes(server);
  log << "serving on http://" << host << ':' << port << "\n";
  if (!server.listen(host, port)) {
    log << "error: cannot listen on " << host << ':' << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace matern::tools
