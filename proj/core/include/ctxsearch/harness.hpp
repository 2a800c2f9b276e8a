#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ctxsearch/search_core.hpp"
#include "ctxsearch/session.hpp"
#include "ctxsearch/stats.hpp"

namespace ctxsearch {

/// Significance threshold applied to every hypothesis test.
inline constexpr double kSignificanceLevel = 0.05;

struct TaskSpec {
  std::string task_id;
  std::set<DocId> target_doc_ids;
  /// Queries the simulated subject tries, in order.
  std::vector<std::string> seed_queries;
};

struct PhaseConfig {
  Phase phase = Phase::kOS1;
  std::size_t subjects = 10;
  std::vector<TaskSpec> tasks;
};

/// Simulated subject behaviour and the virtual time each action costs.
struct AgentPolicy {
  double p_accept = 0.8;
  std::size_t max_queries = 5;
  std::int64_t query_ms = 20000;
  std::int64_t selection_ms = 4000;
  std::int64_t skip_ms = 1500;
  std::int64_t scan_hit_ms = 1000;
  std::int64_t click_ms = 6000;
};

/// One subject x task outcome.
struct RunRow {
  Phase phase = Phase::kOS1;
  std::string subject;
  std::string task_id;
  bool found = false;
  SessionMetrics metrics;

  bool operator==(const RunRow&) const = default;
};

/// What the simulated subjects need from the search service. Implemented
/// in-process and over HTTP.
class ServiceClient {
 public:
  virtual ~ServiceClient() = default;
  virtual std::string create_session(const std::string& user_id, Phase phase, const std::string& task_id) = 0;
  virtual StageView submit_query(const std::string& session_id, const std::string& query) = 0;
  virtual StageView select(const std::string& session_id, SelectionStage stage,
                           const std::vector<std::string>& ids) = 0;
  virtual SessionMetrics click(const std::string& session_id, const std::string& url) = 0;
  virtual SessionMetrics complete(const std::string& session_id, bool found) = 0;

  /// Number of recommendation / selection calls made so far.
  std::int64_t recommendation_calls() const { return recommendation_calls_; }

 protected:
  std::int64_t recommendation_calls_ = 0;
};

class InProcessClient : public ServiceClient {
 public:
  explicit InProcessClient(std::shared_ptr<SessionService> service) : service_(std::move(service)) {}
  std::string create_session(const std::string& user_id, Phase phase, const std::string& task_id) override;
  StageView submit_query(const std::string& session_id, const std::string& query) override;
  StageView select(const std::string& session_id, SelectionStage stage, const std::vector<std::string>& ids) override;
  SessionMetrics click(const std::string& session_id, const std::string& url) override;
  SessionMetrics complete(const std::string& session_id, bool found) override;

 private:
  std::shared_ptr<SessionService> service_;
};

/// Talks to `ctxsearch serve`. Transport failures raise Error.
class HttpServiceClient : public ServiceClient {
 public:
  explicit HttpServiceClient(std::string base_url);
  ~HttpServiceClient() override;
  std::string create_session(const std::string& user_id, Phase phase, const std::string& task_id) override;
  StageView submit_query(const std::string& session_id, const std::string& query) override;
  StageView select(const std::string& session_id, SelectionStage stage, const std::vector<std::string>& ids) override;
  SessionMetrics click(const std::string& session_id, const std::string& url) override;
  SessionMetrics complete(const std::string& session_id, bool found) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Subject ids used by the simulation: subject-01, subject-02, ...
std::string subject_id(std::size_t index);

/// Runs every subject through every task. Each subject issues the task's seed
/// queries in order, accepts the top offer of each selection stage (per
/// keyword for senses) with probability p_accept, clicks the first hit that
/// is a target, and completes on that click or after max_queries attempts.
/// `advance_clock` (optional) receives the virtual duration of each action.
/// Deterministic for a given seed.
std::vector<RunRow> run_phase_simulation(const PhaseConfig& cfg, ServiceClient& client, const AgentPolicy& policy,
                                         std::uint64_t seed,
                                         const std::function<void(std::int64_t)>& advance_clock = {});

struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
};

struct HypothesisResult {
  std::string id;      // H1.1 ... H1.5
  std::string metric;  // queries, clicks, hits, urls, elapsed_ms
  KruskalWallisResult test;
  bool significant = false;
};

struct TaskHypothesisResult {
  std::string task_id;
  std::string id;
  std::string metric;
  KruskalWallisResult test;
  bool significant = false;
};

struct RunReport {
  std::vector<RunRow> rows;
  /// phase -> metric -> summary over per-task rows.
  std::map<Phase, std::map<std::string, MetricSummary>> per_phase;
  /// Across-phase tests on per-subject totals, H1.1..H1.5 in order.
  std::vector<HypothesisResult> hypotheses;
  /// The same tests on per-task rows, task by task.
  std::vector<TaskHypothesisResult> per_task;
};

/// Metric names in hypothesis order.
const std::vector<std::string>& metric_names();
double metric_value(const SessionMetrics& m, const std::string& metric);

/// Throws ValidationError unless rows cover all three phases.
RunReport aggregate_report(std::vector<RunRow> rows);

std::string report_to_json(const RunReport& report);

std::string row_to_json(const RunRow& row);
RunRow row_from_json(const std::string& line);
void write_rows(const std::vector<RunRow>& rows, const std::filesystem::path& path);
std::vector<RunRow> read_rows(const std::filesystem::path& path);

/// Everything `ctxsearch simulate` needs, read from a JSON file. Relative
/// paths resolve against the file's directory.
struct SimulationConfig {
  std::filesystem::path corpus;  // corpus directory or CTXIDX1 index file
  std::filesystem::path lexicon;
  std::filesystem::path ontology;
  std::filesystem::path stopwords;
  std::filesystem::path seed_stores;  // optional: profiles/ and sckb.jsonl copied per run
  std::size_t subjects = 10;
  std::vector<TaskSpec> tasks;
  AgentPolicy policy;
  ServiceConfig service;
};

SimulationConfig load_simulation_config(const std::filesystem::path& path);

/// Builds an in-process service over a fresh copy of the seed stores in
/// `work_dir` and runs one phase. Validates that task targets exist.
std::vector<RunRow> simulate_phase(const SimulationConfig& config, Phase phase, std::uint64_t seed,
                                   const std::filesystem::path& work_dir);

}  // namespace ctxsearch
