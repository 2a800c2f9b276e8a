#include "ctxsearch/harness.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "ctxsearch/error.hpp"
#include "json_codec.hpp"
#include "text_util.hpp"

namespace ctxsearch {

// --- clients --------------------------------------------------------------------

std::string InProcessClient::create_session(const std::string& user_id, Phase phase, const std::string& task_id) {
  return service_->create_session(user_id, phase, task_id);
}

StageView InProcessClient::submit_query(const std::string& session_id, const std::string& query) {
  return service_->submit_query(session_id, query);
}

StageView InProcessClient::select(const std::string& session_id, SelectionStage stage,
                                  const std::vector<std::string>& ids) {
  ++recommendation_calls_;
  return service_->apply_selection(session_id, stage, ids);
}

SessionMetrics InProcessClient::click(const std::string& session_id, const std::string& url) {
  return service_->report_click(session_id, url);
}

SessionMetrics InProcessClient::complete(const std::string& session_id, bool found) {
  return service_->complete_task(session_id, found);
}

struct HttpServiceClient::Impl {
  httplib::Client client;
  explicit Impl(const std::string& base) : client(base) {
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
  }

  json call(const char* method, const std::string& path, const json& body = json::object()) {
    httplib::Result res = std::string_view(method) == "GET"
                              ? client.Get(path)
                              : client.Post(path, body.dump(), "application/json");
    if (!res) throw Error(std::string("service unreachable: ") + httplib::to_string(res.error()));
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception&) {
      throw Error("service sent a non-JSON reply (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status >= 400) {
      const auto kind = reply.at("error").value("kind", std::string{});
      const auto msg = reply.at("error").value("message", std::string{});
      if (kind == "state") throw StateError(msg);
      if (kind == "not_found") throw NotFoundError(msg);
      if (kind == "validation" || kind == "parse") throw ValidationError(msg);
      if (kind == "adapter") throw AdapterError(msg);
      throw Error(msg);
    }
    return reply;
  }
};

HttpServiceClient::HttpServiceClient(std::string base_url) : impl_(std::make_unique<Impl>(base_url)) {}
HttpServiceClient::~HttpServiceClient() = default;

std::string HttpServiceClient::create_session(const std::string& user_id, Phase phase, const std::string& task_id) {
  return impl_->call("POST", "/sessions", {{"user_id", user_id}, {"phase", to_string(phase)}, {"task_id", task_id}})
      .at("session_id")
      .get<std::string>();
}

StageView HttpServiceClient::submit_query(const std::string& session_id, const std::string& query) {
  return impl_->call("POST", "/sessions/" + session_id + "/query", {{"query", query}}).get<StageView>();
}

StageView HttpServiceClient::select(const std::string& session_id, SelectionStage stage,
                                    const std::vector<std::string>& ids) {
  ++recommendation_calls_;
  return impl_->call("POST", "/sessions/" + session_id + "/selections", {{"stage", to_string(stage)}, {"ids", ids}})
      .get<StageView>();
}

SessionMetrics HttpServiceClient::click(const std::string& session_id, const std::string& url) {
  return impl_->call("POST", "/sessions/" + session_id + "/clicks", {{"url", url}}).at("metrics").get<SessionMetrics>();
}

SessionMetrics HttpServiceClient::complete(const std::string& session_id, bool found) {
  return impl_->call("POST", "/sessions/" + session_id + "/complete", {{"found", found}})
      .at("metrics")
      .get<SessionMetrics>();
}

// --- simulation -----------------------------------------------------------------

std::string subject_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "subject-%02zu", index + 1);
  return buf;
}

namespace {

// Uniform [0, 1) from the top 53 bits.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<RunRow> run_phase_simulation(const PhaseConfig& cfg, ServiceClient& client, const AgentPolicy& policy,
                                         std::uint64_t seed, const std::function<void(std::int64_t)>& advance_clock) {
  if (cfg.subjects == 0) throw ValidationError("phase needs at least one subject");
  if (cfg.tasks.empty()) throw ValidationError("phase needs at least one task");
  auto advance = [&](std::int64_t ms) {
    if (advance_clock) advance_clock(ms);
  };

  std::vector<RunRow> rows;
  for (std::size_t subject = 0; subject < cfg.subjects; ++subject) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(subject)};
    std::mt19937_64 rng(seq);
    const auto user = subject_id(subject);

    for (const auto& task : cfg.tasks) {
      const auto sid = client.create_session(user, cfg.phase, task.task_id);
      bool found = false;
      const std::size_t attempts = std::min(policy.max_queries, task.seed_queries.size());
      for (std::size_t qi = 0; qi < attempts && !found; ++qi) {
        advance(policy.query_ms);
        StageView view;
        try {
          view = client.submit_query(sid, task.seed_queries[qi]);
        } catch (const ValidationError&) {
          continue;
        } catch (const AdapterError&) {
          continue;
        }
        if (cfg.phase != Phase::kOS3) {
          for (auto stage : {SelectionStage::kSenses, SelectionStage::kMetas, SelectionStage::kConcepts}) {
            std::vector<std::string> picks;
            if (stage == SelectionStage::kSenses) {
              std::set<std::string> seen;
              for (const auto& o : view.offers) {
                if (!seen.insert(o.keyword).second) continue;
                if (unit_draw(rng) < policy.p_accept) picks.push_back(o.id);
              }
            } else if (!view.offers.empty() && unit_draw(rng) < policy.p_accept) {
              picks.push_back(view.offers.front().id);
            }
            advance(picks.empty() ? policy.skip_ms : policy.selection_ms * static_cast<std::int64_t>(picks.size()));
            view = client.select(sid, stage, picks);
          }
        }
        for (const auto& hit : view.hits) {
          advance(policy.scan_hit_ms);
          if (task.target_doc_ids.contains(hit.doc_id)) {
            advance(policy.click_ms);
            client.click(sid, hit.url);
            found = true;
            break;
          }
        }
      }
      rows.push_back({cfg.phase, user, task.task_id, found, client.complete(sid, found)});
    }
  }
  return rows;
}

// --- report ---------------------------------------------------------------------

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> kNames{"queries", "clicks", "hits", "urls", "elapsed_ms"};
  return kNames;
}

double metric_value(const SessionMetrics& m, const std::string& metric) {
  if (metric == "queries") return static_cast<double>(m.queries);
  if (metric == "clicks") return static_cast<double>(m.clicks);
  if (metric == "hits") return static_cast<double>(m.hits);
  if (metric == "urls") return static_cast<double>(m.urls);
  if (metric == "elapsed_ms") return static_cast<double>(m.elapsed_ms);
  throw ValidationError("unknown metric " + metric);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string hypothesis_id(std::size_t i) { return "H1." + std::to_string(i + 1); }

constexpr Phase kPhases[] = {Phase::kOS1, Phase::kOS2, Phase::kOS3};

}  // namespace

RunReport aggregate_report(std::vector<RunRow> rows) {
  RunReport report;
  std::map<Phase, std::vector<const RunRow*>> by_phase;
  for (const auto& r : rows) by_phase[r.phase].push_back(&r);
  for (auto p : kPhases) {
    if (by_phase[p].empty()) throw ValidationError(std::string("no rows for phase ") + to_string(p));
  }
  const auto& metrics = metric_names();

  for (auto p : kPhases) {
    for (const auto& m : metrics) {
      std::vector<double> v;
      for (const auto* r : by_phase[p]) v.push_back(metric_value(r->metrics, m));
      report.per_phase[p][m] = {mean(v), median(v)};
    }
  }

  for (std::size_t i = 0; i < metrics.size(); ++i) {
    std::vector<std::vector<double>> groups;
    for (auto p : kPhases) {
      std::map<std::string, double> totals;  // subject -> sum over tasks
      for (const auto* r : by_phase[p]) totals[r->subject] += metric_value(r->metrics, metrics[i]);
      std::vector<double> g;
      for (const auto& [s, t] : totals) g.push_back(t);
      groups.push_back(std::move(g));
    }
    const auto test = kruskal_wallis(groups);
    report.hypotheses.push_back({hypothesis_id(i), metrics[i], test, test.p < kSignificanceLevel});
  }

  std::set<std::string> tasks;
  for (const auto& r : rows) tasks.insert(r.task_id);
  for (const auto& task : tasks) {
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      std::vector<std::vector<double>> groups(3);
      for (std::size_t k = 0; k < 3; ++k) {
        for (const auto* r : by_phase[kPhases[k]]) {
          if (r->task_id == task) groups[k].push_back(metric_value(r->metrics, metrics[i]));
        }
      }
      if (std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); })) continue;
      const auto test = kruskal_wallis(groups);
      report.per_task.push_back({task, hypothesis_id(i), metrics[i], test, test.p < kSignificanceLevel});
    }
  }
  report.rows = std::move(rows);
  return report;
}

std::string report_to_json(const RunReport& report) {
  json phases = json::object();
  for (const auto& [p, by_metric] : report.per_phase) {
    json m = json::object();
    for (const auto& [name, s] : by_metric) m[name] = {{"mean", s.mean}, {"median", s.median}};
    std::size_t n = 0;
    for (const auto& r : report.rows) n += r.phase == p;
    phases[to_string(p)] = {{"rows", n}, {"metrics", std::move(m)}};
  }
  json hyps = json::array();
  for (const auto& h : report.hypotheses) {
    hyps.push_back({{"id", h.id}, {"metric", h.metric}, {"statistic", h.test.h}, {"df", h.test.df},
                    {"p", h.test.p}, {"significant", h.significant}});
  }
  json tasks = json::array();
  for (const auto& t : report.per_task) {
    tasks.push_back({{"task_id", t.task_id}, {"id", t.id}, {"metric", t.metric}, {"statistic", t.test.h},
                     {"df", t.test.df}, {"p", t.test.p}, {"significant", t.significant}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"test", "kruskal-wallis"},
              {"alpha", kSignificanceLevel},
              {"row_count", report.rows.size()},
              {"phases", std::move(phases)},
              {"hypotheses", std::move(hyps)},
              {"per_task", std::move(tasks)}}
      .dump(2);
}

std::string row_to_json(const RunRow& row) {
  return json{{"schema_version", kSchemaVersion},
              {"phase", to_string(row.phase)},
              {"subject", row.subject},
              {"task_id", row.task_id},
              {"found", row.found},
              {"queries", row.metrics.queries},
              {"clicks", row.metrics.clicks},
              {"hits", row.metrics.hits},
              {"urls", row.metrics.urls},
              {"elapsed_ms", row.metrics.elapsed_ms}}
      .dump();
}

RunRow row_from_json(const std::string& line) {
  const auto j = json::parse(line);
  RunRow r;
  r.phase = parse_phase(j.at("phase").get<std::string>());
  j.at("subject").get_to(r.subject);
  j.at("task_id").get_to(r.task_id);
  j.at("found").get_to(r.found);
  r.metrics = j.get<SessionMetrics>();
  return r;
}

void write_rows(const std::vector<RunRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write rows to " + path.string());
  for (const auto& r : rows) out << row_to_json(r) << '\n';
  if (!out) throw StorageError("write to " + path.string() + " failed");
}

std::vector<RunRow> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read rows from " + path.string());
  std::vector<RunRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++n;
    try {
      rows.push_back(row_from_json(line));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed row: ") + e.what(), n);
    }
  }
  return rows;
}

// --- configured runs --------------------------------------------------------------

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read simulation config " + path.string());
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  SimulationConfig cfg;
  try {
    const auto j = json::parse(in);
    cfg.corpus = resolve(j.at("corpus").get<std::string>());
    cfg.lexicon = resolve(j.at("lexicon").get<std::string>());
    cfg.ontology = resolve(j.at("ontology").get<std::string>());
    cfg.stopwords = resolve(j.at("stopwords").get<std::string>());
    cfg.seed_stores = resolve(j.value("seed_stores", std::string{}));
    cfg.subjects = j.value("subjects", std::size_t{10});
    if (j.contains("agent")) {
      const auto& a = j.at("agent");
      cfg.policy.p_accept = a.value("p_accept", cfg.policy.p_accept);
      cfg.policy.max_queries = a.value("max_queries", cfg.policy.max_queries);
      cfg.policy.query_ms = a.value("query_ms", cfg.policy.query_ms);
      cfg.policy.selection_ms = a.value("selection_ms", cfg.policy.selection_ms);
      cfg.policy.skip_ms = a.value("skip_ms", cfg.policy.skip_ms);
      cfg.policy.scan_hit_ms = a.value("scan_hit_ms", cfg.policy.scan_hit_ms);
      cfg.policy.click_ms = a.value("click_ms", cfg.policy.click_ms);
    }
    if (j.contains("service")) {
      const auto& s = j.at("service");
      cfg.service.page_size = s.value("page_size", cfg.service.page_size);
      cfg.service.query_cap = s.value("query_cap", cfg.service.query_cap);
      cfg.service.sckb_enabled = s.value("sckb", cfg.service.sckb_enabled);
      cfg.service.private_users = s.value("private_users", std::set<std::string>{});
      cfg.service.recommender.shared_weight = s.value("shared_weight", cfg.service.recommender.shared_weight);
      cfg.service.recommender.meta_keyword_limit =
          s.value("meta_keyword_limit", cfg.service.recommender.meta_keyword_limit);
      cfg.service.recommender.sense_k = s.value("sense_k", cfg.service.recommender.sense_k);
      cfg.service.recommender.concept_k = s.value("concept_k", cfg.service.recommender.concept_k);
    }
    for (const auto& t : j.at("tasks")) {
      TaskSpec task;
      t.at("task_id").get_to(task.task_id);
      task.target_doc_ids = t.at("target_doc_ids").get<std::set<DocId>>();
      t.at("seed_queries").get_to(task.seed_queries);
      if (task.target_doc_ids.empty()) throw ValidationError("task " + task.task_id + " has no target documents");
      cfg.tasks.push_back(std::move(task));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed simulation config: ") + e.what(), 1);
  }
  if (cfg.tasks.empty()) throw ValidationError("simulation config has no tasks");
  if (cfg.subjects == 0) throw ValidationError("simulation config needs at least one subject");
  if (cfg.policy.p_accept < 0.0 || cfg.policy.p_accept > 1.0) throw ValidationError("p_accept must be in [0, 1]");
  return cfg;
}

std::vector<RunRow> simulate_phase(const SimulationConfig& config, Phase phase, std::uint64_t seed,
                                   const std::filesystem::path& work_dir) {
  auto stopwords = std::make_shared<const StopwordList>(load_stopwords(config.stopwords));
  std::shared_ptr<const Index> index;
  if (std::filesystem::is_directory(config.corpus)) {
    index = std::make_shared<const Index>(index_corpus(load_corpus_dir(config.corpus, *stopwords), *stopwords));
  } else {
    index = std::make_shared<const Index>(load_index(config.corpus));
  }
  for (const auto& t : config.tasks) {
    for (auto id : t.target_doc_ids) {
      if (!index->doc(id)) {
        throw ValidationError("task " + t.task_id + " targets unknown doc " + std::to_string(id));
      }
    }
  }

  std::filesystem::remove_all(work_dir);
  std::filesystem::create_directories(work_dir);
  if (!config.seed_stores.empty()) {
    std::filesystem::copy(config.seed_stores, work_dir, std::filesystem::copy_options::recursive);
  }

  SearchResources res;
  res.lexicon = std::make_shared<const Lexicon>(load_lexicon(config.lexicon));
  res.stopwords = stopwords;
  res.ontology = std::make_shared<const Ontology>(load_ontology(config.ontology));
  res.index = index;
  auto clock = std::make_shared<ManualClock>(0);
  auto service = std::make_shared<SessionService>(res, std::make_shared<StoreRegistry>(work_dir), clock,
                                                  config.service);
  InProcessClient client(service);
  PhaseConfig pc{phase, config.subjects, config.tasks};
  return run_phase_simulation(pc, client, config.policy, seed, [&](std::int64_t ms) { clock->advance(ms); });
}

}  // namespace ctxsearch
