#pragma once

#include <memory>
#include <string>

#include "ctxsearch/session.hpp"

namespace ctxsearch {

/// JSON-over-HTTP front of a SessionService.
///
///   POST /sessions                       {"user_id","phase","task_id"}
///   POST /sessions/{id}/query            {"query"}
///   GET  /sessions/{id}/recommendations
///   POST /sessions/{id}/selections       {"stage": "senses|metas|concepts", "ids": [...]}
///   GET  /sessions/{id}/results?page=n
///   POST /sessions/{id}/clicks           {"url"}
///   POST /sessions/{id}/complete         {"found": bool}
///   GET  /sessions/{id}/metrics
///   GET  /users/{id}/profile[?limit=n]
///   GET  /sckb/stats
///
/// Every response body carries "schema_version". Errors answer
/// {"schema_version", "error": {"kind", "message"}} with status 400
/// (validation/parse), 404 (unknown session), 409 (state) or 502 (engine).
class HttpApi {
 public:
  explicit HttpApi(std::shared_ptr<SessionService> service);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws Error if binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop() is called from elsewhere.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ctxsearch
