#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/profile_store.hpp"
#include "ctxsearch/query_builder.hpp"
#include "ctxsearch/recommender.hpp"
#include "ctxsearch/search_core.hpp"

namespace ctxsearch {

/// Version stamped on every API response and persisted report.
inline constexpr int kSchemaVersion = 1;

/// OS1: personal profile only. OS2: profile plus SCKB. OS3: baseline engine,
/// no contextual features.
enum class Phase { kOS1, kOS2, kOS3 };

/// Accepts "OS1"/"OS2"/"OS3" and "OS-I"/"OS-II"/"OS-III". Throws ValidationError.
Phase parse_phase(std::string_view text);
const char* to_string(Phase phase);

enum class SessionState { kAwaitingQuery, kSensesOffered, kMetasOffered, kConceptsOffered, kResultsShown, kCompleted };
const char* to_string(SessionState state);

enum class SelectionStage { kSenses, kMetas, kConcepts };
SelectionStage parse_stage(std::string_view text);
const char* to_string(SelectionStage stage);

/// Counters behind the five efficiency measures.
struct SessionMetrics {
  std::int64_t queries = 0;     // queries entered
  std::int64_t clicks = 0;      // hit clicks plus recommendation selections
  std::int64_t hits = 0;        // result items returned across requested pages
  std::int64_t urls = 0;        // distinct clicked URLs
  std::int64_t elapsed_ms = 0;  // completion minus creation time

  bool operator==(const SessionMetrics&) const = default;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
};

/// Deterministic clock for tests and simulation.
class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() override { return now_.load(); }
  void advance(std::int64_t ms) { now_ += ms; }
  void set(std::int64_t ms) { now_ = ms; }

 private:
  std::atomic<std::int64_t> now_;
};

/// File-backed profiles and SCKB with snapshot reads. Writes are serialized
/// per user and for the SCKB; readers get immutable snapshots and never block
/// on writers. An empty root keeps everything in memory.
class StoreRegistry {
 public:
  explicit StoreRegistry(std::filesystem::path root = {});

  std::shared_ptr<const PersonalProfile> profile(const std::string& user_id);
  std::shared_ptr<const SharedKnowledgeBase> sckb();

  /// Assigns an entry id when empty, stamps the user id, and records.
  /// Returns the recorded entry.
  ProfileEntry record(const std::string& user_id, ProfileEntry entry);
  void update(const std::string& user_id, const ProfileEntry& entry);
  /// Replaces the user's profile with `entries` (import).
  void replace_profile(const std::string& user_id, std::vector<ProfileEntry> entries);
  std::string merge(const ProfileEntry& entry);

  std::filesystem::path profile_path(const std::string& user_id) const;
  std::filesystem::path sckb_path() const;

 private:
  struct UserSlot {
    std::mutex write_mutex;
    std::shared_ptr<const PersonalProfile> snapshot;
  };
  UserSlot& slot(const std::string& user_id);

  std::filesystem::path root_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<UserSlot>> users_;
  std::mutex sckb_write_mutex_;
  std::shared_ptr<const SharedKnowledgeBase> sckb_;
};

/// Read-only inputs shared by all sessions.
struct SearchResources {
  std::shared_ptr<const Lexicon> lexicon;
  std::shared_ptr<const StopwordList> stopwords;
  std::shared_ptr<const Ontology> ontology;
  std::shared_ptr<const Index> index;
  /// Engine for OS3 sessions; defaults to a LocalSearchAdapter over `index`.
  std::shared_ptr<SearchAdapter> baseline;
};

struct ServiceConfig {
  RecommenderConfig recommender;
  std::size_t page_size = 10;
  std::size_t query_cap = kDefaultQueryCap;
  /// When false the SCKB is neither read (OS2) nor written.
  bool sckb_enabled = true;
  /// Users who do not share: their entries are never merged into the SCKB.
  std::set<std::string> private_users;
};

/// One recommendation offered at a selection stage.
struct Offer {
  std::string id;
  SelectionStage stage = SelectionStage::kSenses;
  std::string keyword;  // senses only
  std::string label;
  std::vector<std::string> words;
  double score = 0.0;
  std::string source;

  bool operator==(const Offer&) const = default;
};

/// What the client sees after each step.
struct StageView {
  std::string session_id;
  SessionState state = SessionState::kAwaitingQuery;
  std::vector<Offer> offers;
  std::string query;  // serialized Boolean query once results exist
  std::size_t page = 0;
  std::vector<SearchHit> hits;
  SessionMetrics metrics;

  bool operator==(const StageView&) const = default;
};

struct SessionInfo {
  std::string session_id;
  std::string user_id;
  std::string task_id;
  Phase phase = Phase::kOS1;
  SessionState state = SessionState::kAwaitingQuery;
  bool sckb_enabled = false;
  bool found = false;
  /// Instrumentation: SCKB snapshots taken and store writes made on behalf
  /// of this session.
  std::int64_t sckb_reads = 0;
  std::int64_t store_writes = 0;
  std::int64_t started_at_ms = 0;
  std::optional<std::int64_t> completed_at_ms;
};

/// Session orchestration over the interaction order query -> senses -> meta
/// keywords -> concepts -> results. Sessions run concurrently; operations on
/// one session are serialized.
class SessionService {
 public:
  SessionService(SearchResources resources, std::shared_ptr<StoreRegistry> stores, std::shared_ptr<Clock> clock,
                 ServiceConfig config = {});
  ~SessionService();

  std::string create_session(const std::string& user_id, Phase phase, const std::string& task_id);

  /// Counts the query even when it normalizes to nothing (then throws
  /// ValidationError). OS3 returns results directly.
  StageView submit_query(const std::string& session_id, const std::string& raw_query);
  /// Current stage, offers and first-page results without side effects.
  StageView current(const std::string& session_id);
  /// Records the chosen offer ids of `stage` (empty = skip) and moves on.
  /// Later stages may be targeted directly; the ones in between count as
  /// skipped. Throws StateError for an earlier stage or outside the selection
  /// stages, ValidationError for an unknown id.
  StageView apply_selection(const std::string& session_id, SelectionStage stage,
                            const std::vector<std::string>& offer_ids);
  /// Result page `page` (1-based) of the current query. A page's items count
  /// toward hits the first time it is returned for a query.
  StageView results(const std::string& session_id, std::size_t page);
  SessionMetrics report_click(const std::string& session_id, const std::string& url);
  SessionMetrics complete_task(const std::string& session_id, bool found);
  SessionMetrics metrics(const std::string& session_id);
  SessionInfo info(const std::string& session_id);

  StoreRegistry& stores() { return *stores_; }
  const ServiceConfig& config() const { return config_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& session_id);

  void offer_senses(Session& s);
  void offer_metas(Session& s);
  void offer_concepts(Session& s);
  void show_results(Session& s);
  void close_round(Session& s);
  StageView view(const Session& s) const;
  TermVector selection_context(const Session& s, bool with_metas) const;
  std::shared_ptr<const SharedKnowledgeBase> read_sckb(Session& s);

  SearchResources res_;
  std::shared_ptr<StoreRegistry> stores_;
  std::shared_ptr<Clock> clock_;
  ServiceConfig config_;
  std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

}  // namespace ctxsearch
