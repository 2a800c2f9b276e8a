#include "ctxsearch/http_api.hpp"

#include <httplib.h>

#include <thread>

#include "ctxsearch/error.hpp"
#include "json_codec.hpp"

namespace ctxsearch {
namespace {

void reply(httplib::Response& res, json body, int status = 200) {
  body["schema_version"] = kSchemaVersion;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
  reply(res, json{{"error", {{"kind", kind}, {"message", message}}}}, status);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON body: ") + e.what());
  }
}

std::size_t positive_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ValidationError(std::string(name) + " must be a positive integer");
  }
}

// Maps library errors onto HTTP statuses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFoundError& e) {
      reply_error(res, 404, "not_found", e.what());
    } catch (const StateError& e) {
      reply_error(res, 409, "state", e.what());
    } catch (const AdapterError& e) {
      reply_error(res, 502, "adapter", e.what());
    } catch (const ParseError& e) {
      reply_error(res, 400, "parse", e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 400, "validation", e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, "validation", e.what());
    } catch (const StorageError& e) {
      reply_error(res, 500, "storage", e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

struct HttpApi::Impl {
  std::shared_ptr<SessionService> service;
  httplib::Server server;
  std::thread thread;

  void routes() {
    auto& svc = *service;
    server.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto user = body.at("user_id").get<std::string>();
      const auto phase = parse_phase(body.at("phase").get<std::string>());
      const auto id = svc.create_session(user, phase, body.value("task_id", std::string{}));
      const auto info = svc.info(id);
      reply(res,
            {{"session_id", id},
             {"user_id", info.user_id},
             {"task_id", info.task_id},
             {"phase", to_string(info.phase)},
             {"state", to_string(info.state)},
             {"sckb_enabled", info.sckb_enabled}},
            201);
    }));
    server.Post(R"(/sessions/([^/]+)/query)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      reply(res, svc.submit_query(req.matches[1], body.at("query").get<std::string>()));
    }));
    server.Get(R"(/sessions/([^/]+)/recommendations)",
               guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 reply(res, svc.current(req.matches[1]));
               }));
    server.Post(R"(/sessions/([^/]+)/selections)",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  const auto stage = parse_stage(body.at("stage").get<std::string>());
                  const auto ids = body.value("ids", std::vector<std::string>{});
                  reply(res, svc.apply_selection(req.matches[1], stage, ids));
                }));
    server.Get(R"(/sessions/([^/]+)/results)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      reply(res, svc.results(req.matches[1], positive_param(req, "page", 1)));
    }));
    server.Post(R"(/sessions/([^/]+)/clicks)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      reply(res, {{"metrics", svc.report_click(req.matches[1], body.at("url").get<std::string>())}});
    }));
    server.Post(R"(/sessions/([^/]+)/complete)",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  reply(res, {{"metrics", svc.complete_task(req.matches[1], body.value("found", false))}});
                }));
    server.Get(R"(/sessions/([^/]+)/metrics)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto info = svc.info(id);
      reply(res, {{"session_id", id},
                  {"state", to_string(info.state)},
                  {"completed", info.completed_at_ms.has_value()},
                  {"metrics", svc.metrics(id)}});
    }));
    server.Get(R"(/users/([^/]+)/profile)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
      const std::string user = req.matches[1];
      const auto limit = positive_param(req, "limit", 50);
      const auto profile = svc.stores().profile(user);
      if (profile->entries.empty()) throw NotFoundError("user " + user + " has no profile entries");
      reply(res, {{"user_id", user},
                  {"entry_count", profile->entries.size()},
                  {"entries", query_entries(*profile, limit)}});
    }));
    server.Get("/sckb/stats", guarded([&svc](const httplib::Request&, httplib::Response& res) {
      const auto sckb = svc.stores().sckb();
      long long contributions = 0;
      for (const auto& [id, n] : sckb->contributor_count) contributions += n;
      reply(res, {{"enabled", svc.config().sckb_enabled},
                  {"entries", sckb->entries.size()},
                  {"contributions", contributions}});
    }));
  }
};

HttpApi::HttpApi(std::shared_ptr<SessionService> service) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->routes();
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpApi::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error("cannot serve on " + host + ":" + std::to_string(port));
}

void HttpApi::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ctxsearch
