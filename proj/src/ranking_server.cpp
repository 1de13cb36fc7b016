#include <httplib.h>

#include "subguard/ranking.hpp"

namespace subguard {

bool serve_search(const RepoStore& store, const ScoringConfig& config, const std::string& host, int port) {
  httplib::Server server;
  server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
    auto [status, body] = handle_search_query(store, config, params);
    res.status = status;
    res.set_content(body, "application/json");
  });
  return server.listen(host, port);
}

}  // namespace subguard
