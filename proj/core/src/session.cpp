#include "ctxsearch/session.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>

#include "ctxsearch/behavior.hpp"
#include "ctxsearch/error.hpp"

namespace ctxsearch {

// --- enums --------------------------------------------------------------------

Phase parse_phase(std::string_view text) {
  if (text == "OS1" || text == "OS-I") return Phase::kOS1;
  if (text == "OS2" || text == "OS-II") return Phase::kOS2;
  if (text == "OS3" || text == "OS-III") return Phase::kOS3;
  throw ValidationError("unknown phase '" + std::string(text) + "'");
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kOS1: return "OS1";
    case Phase::kOS2: return "OS2";
    case Phase::kOS3: return "OS3";
  }
  return "?";
}

const char* to_string(SessionState state) {
  switch (state) {
    case SessionState::kAwaitingQuery: return "AwaitingQuery";
    case SessionState::kSensesOffered: return "SensesOffered";
    case SessionState::kMetasOffered: return "MetasOffered";
    case SessionState::kConceptsOffered: return "ConceptsOffered";
    case SessionState::kResultsShown: return "ResultsShown";
    case SessionState::kCompleted: return "Completed";
  }
  return "?";
}

SelectionStage parse_stage(std::string_view text) {
  if (text == "senses") return SelectionStage::kSenses;
  if (text == "metas") return SelectionStage::kMetas;
  if (text == "concepts") return SelectionStage::kConcepts;
  throw ValidationError("unknown selection stage '" + std::string(text) + "'");
}

const char* to_string(SelectionStage stage) {
  switch (stage) {
    case SelectionStage::kSenses: return "senses";
    case SelectionStage::kMetas: return "metas";
    case SelectionStage::kConcepts: return "concepts";
  }
  return "?";
}

std::int64_t SystemClock::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// --- stores -------------------------------------------------------------------

namespace {

void check_user_id(const std::string& user_id) {
  if (user_id.empty()) throw ValidationError("empty user id");
  for (unsigned char c : user_id) {
    if (!std::isalnum(c) && c != '-' && c != '_' && c != '.') {
      throw ValidationError("user id '" + user_id + "' has characters outside [A-Za-z0-9._-]");
    }
  }
  if (user_id == "." || user_id == "..") throw ValidationError("invalid user id");
}

}  // namespace

StoreRegistry::StoreRegistry(std::filesystem::path root) : root_(std::move(root)) {
  auto sckb = root_.empty() ? SharedKnowledgeBase{} : load_sckb(sckb_path());
  sckb_ = std::make_shared<const SharedKnowledgeBase>(std::move(sckb));
}

std::filesystem::path StoreRegistry::profile_path(const std::string& user_id) const {
  if (root_.empty()) return {};
  return root_ / "profiles" / (user_id + ".jsonl");
}

std::filesystem::path StoreRegistry::sckb_path() const { return root_.empty() ? root_ : root_ / "sckb.jsonl"; }

StoreRegistry::UserSlot& StoreRegistry::slot(const std::string& user_id) {
  check_user_id(user_id);
  std::lock_guard lock(map_mutex_);
  auto& s = users_[user_id];
  if (!s) {
    s = std::make_unique<UserSlot>();
    auto profile = root_.empty() ? PersonalProfile{user_id, {}, {}} : load_profile(profile_path(user_id), user_id);
    s->snapshot = std::make_shared<const PersonalProfile>(std::move(profile));
  }
  return *s;
}

std::shared_ptr<const PersonalProfile> StoreRegistry::profile(const std::string& user_id) {
  auto& s = slot(user_id);
  std::lock_guard lock(map_mutex_);
  return s.snapshot;
}

std::shared_ptr<const SharedKnowledgeBase> StoreRegistry::sckb() {
  std::lock_guard lock(map_mutex_);
  return sckb_;
}

ProfileEntry StoreRegistry::record(const std::string& user_id, ProfileEntry entry) {
  auto& s = slot(user_id);
  std::lock_guard write(s.write_mutex);
  auto next = std::make_shared<PersonalProfile>(*profile(user_id));
  entry.user_id = user_id;
  if (entry.entry_id.empty()) {
    std::size_t seq = next->entries.size() + 1;
    auto taken = [&](const std::string& id) {
      return std::any_of(next->entries.begin(), next->entries.end(),
                         [&](const ProfileEntry& e) { return e.entry_id == id; });
    };
    while (taken(user_id + "-" + std::to_string(seq))) ++seq;
    entry.entry_id = user_id + "-" + std::to_string(seq);
  }
  if (!next->entries.empty()) entry.timestamp_ms = std::max(entry.timestamp_ms, next->entries.back().timestamp_ms);
  record_entry(*next, entry);
  std::lock_guard lock(map_mutex_);
  s.snapshot = std::move(next);
  return entry;
}

void StoreRegistry::update(const std::string& user_id, const ProfileEntry& entry) {
  auto& s = slot(user_id);
  std::lock_guard write(s.write_mutex);
  auto next = std::make_shared<PersonalProfile>(*profile(user_id));
  update_entry(*next, entry);
  std::lock_guard lock(map_mutex_);
  s.snapshot = std::move(next);
}

void StoreRegistry::replace_profile(const std::string& user_id, std::vector<ProfileEntry> entries) {
  auto& s = slot(user_id);
  std::lock_guard write(s.write_mutex);
  auto next = std::make_shared<PersonalProfile>(PersonalProfile{user_id, {}, profile_path(user_id)});
  // Validate everything before touching the file.
  PersonalProfile check{user_id, {}, {}};
  for (auto& e : entries) record_entry(check, e);
  next->entries = std::move(check.entries);
  if (!next->log_path.empty()) save_profile(*next, next->log_path);
  std::lock_guard lock(map_mutex_);
  s.snapshot = std::move(next);
}

std::string StoreRegistry::merge(const ProfileEntry& entry) {
  std::lock_guard write(sckb_write_mutex_);
  auto next = std::make_shared<SharedKnowledgeBase>(*sckb());
  next->log_path = sckb_path();
  auto id = merge_into_sckb(*next, entry);
  std::lock_guard lock(map_mutex_);
  sckb_ = std::move(next);
  return id;
}

// --- sessions -----------------------------------------------------------------

struct SessionService::Session {
  std::mutex mutex;
  SessionInfo info;
  SessionMetrics metrics;

  // Current query round.
  bool round_open = false;
  ProfileEntry entry;
  std::shared_ptr<const PersonalProfile> profile;
  std::shared_ptr<const SharedKnowledgeBase> sckb;
  std::vector<Offer> offers;
  std::map<std::string, DisambiguatedTerm> sense_offers;
  std::map<std::string, MetaKeyword> meta_offers;
  std::map<std::string, Concept> concept_offers;
  std::vector<DisambiguatedTerm> chosen_senses;
  std::vector<MetaKeyword> chosen_metas;
  std::vector<Concept> chosen_concepts;
  std::optional<BooleanQuery> query;
  std::string query_text;
  std::set<std::size_t> counted_pages;
  std::size_t page = 0;
  std::vector<SearchHit> hits;

  // Whole session.
  std::vector<std::string> presented_urls;
  std::set<std::string> clicked_urls;
};

SessionService::SessionService(SearchResources resources, std::shared_ptr<StoreRegistry> stores,
                               std::shared_ptr<Clock> clock, ServiceConfig config)
    : res_(std::move(resources)), stores_(std::move(stores)), clock_(std::move(clock)), config_(config) {
  if (!res_.lexicon || !res_.stopwords || !res_.ontology || !res_.index) {
    throw ValidationError("session service needs lexicon, stopwords, ontology and index");
  }
  if (!res_.baseline) res_.baseline = std::make_shared<LocalSearchAdapter>(res_.index, config_.page_size);
  if (!stores_) stores_ = std::make_shared<StoreRegistry>();
  if (!clock_) clock_ = std::make_shared<SystemClock>();
}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& session_id) {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  return it->second;
}

std::string SessionService::create_session(const std::string& user_id, Phase phase, const std::string& task_id) {
  check_user_id(user_id);
  auto s = std::make_shared<Session>();
  s->info.user_id = user_id;
  s->info.task_id = task_id;
  s->info.phase = phase;
  s->info.sckb_enabled = phase == Phase::kOS2 && config_.sckb_enabled;
  s->info.started_at_ms = clock_->now_ms();
  std::unique_lock lock(sessions_mutex_);
  s->info.session_id = "s" + std::to_string(next_session_++);
  sessions_[s->info.session_id] = s;
  return s->info.session_id;
}

std::shared_ptr<const SharedKnowledgeBase> SessionService::read_sckb(Session& s) {
  if (!s.info.sckb_enabled) return nullptr;
  ++s.info.sckb_reads;
  return stores_->sckb();
}

void SessionService::close_round(Session& s) {
  if (!s.round_open) return;
  s.round_open = false;
  if (s.info.phase == Phase::kOS3) return;
  s.entry.timestamp_ms = clock_->now_ms();
  const auto recorded = stores_->record(s.info.user_id, s.entry);
  ++s.info.store_writes;
  if (config_.sckb_enabled && !config_.private_users.contains(s.info.user_id)) {
    stores_->merge(recorded);
    ++s.info.store_writes;
  }
}

StageView SessionService::submit_query(const std::string& session_id, const std::string& raw_query) {
  auto sp = find(session_id);
  auto& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.info.state == SessionState::kCompleted) throw StateError("session " + session_id + " is completed");

  ++s.metrics.queries;
  auto keywords = normalize_text(raw_query, *res_.stopwords);
  if (keywords.empty()) throw ValidationError("query has no searchable keywords");
  if (keywords.size() > config_.query_cap) throw ValidationError("query has more keywords than the query cap");

  close_round(s);
  s.round_open = true;
  s.entry = ProfileEntry{};
  s.entry.user_id = s.info.user_id;
  s.entry.raw_query = raw_query;
  s.entry.query_keywords = keywords;
  s.entry.timestamp_ms = clock_->now_ms();
  s.offers.clear();
  s.sense_offers.clear();
  s.meta_offers.clear();
  s.concept_offers.clear();
  s.chosen_senses.clear();
  s.chosen_metas.clear();
  s.chosen_concepts.clear();
  s.query.reset();
  s.query_text.clear();
  s.counted_pages.clear();
  s.page = 0;
  s.hits.clear();

  if (s.info.phase == Phase::kOS3) {
    s.query = build_query(keywords, {}, {}, {}, config_.query_cap);
    s.query_text = serialize_query(*s.query);
    try {
      s.hits = res_.baseline->submit(s.query_text, 1);
    } catch (const AdapterError&) {
      s.round_open = false;
      s.query.reset();
      s.query_text.clear();
      s.info.state = SessionState::kAwaitingQuery;
      throw;
    }
    s.page = 1;
    s.counted_pages.insert(1);
    s.metrics.hits += static_cast<std::int64_t>(s.hits.size());
    for (const auto& h : s.hits) s.presented_urls.push_back(h.url);
    s.info.state = SessionState::kResultsShown;
    return view(s);
  }

  s.profile = stores_->profile(s.info.user_id);
  s.sckb = read_sckb(s);
  offer_senses(s);
  return view(s);
}

void SessionService::offer_senses(Session& s) {
  const auto candidates = candidate_disambiguations(*res_.lexicon, s.entry.query_keywords, *res_.stopwords);
  const auto ranked = recommend_senses(s.entry.query_keywords, candidates, *s.profile, s.sckb.get(),
                                       config_.recommender);
  s.offers.clear();
  s.sense_offers.clear();
  for (const auto& keyword : s.entry.query_keywords) {
    auto it = ranked.find(keyword);
    if (it == ranked.end()) continue;
    for (const auto& c : it->second) {
      Offer o;
      o.id = "sense:" + keyword + ":" + c.payload.sense_id;
      o.stage = SelectionStage::kSenses;
      o.keyword = keyword;
      o.label = c.payload.sense_id;
      o.words = c.payload.words;
      o.score = c.score;
      o.source = to_string(c.source);
      s.sense_offers[o.id] = c.payload;
      s.offers.push_back(std::move(o));
    }
  }
  s.info.state = SessionState::kSensesOffered;
}

TermVector SessionService::selection_context(const Session& s, bool with_metas) const {
  TermVector context = TermVector::counts(s.entry.query_keywords);
  for (const auto& t : s.chosen_senses) context.add(TermVector::counts(t.words));
  if (with_metas) {
    for (const auto& m : s.chosen_metas) context.add(TermVector::counts(m.words));
  }
  return context;
}

void SessionService::offer_metas(Session& s) {
  const auto ranked =
      recommend_meta_keywords(selection_context(s, false), *s.profile, s.sckb.get(), config_.recommender);
  s.offers.clear();
  s.meta_offers.clear();
  int n = 0;
  for (const auto& c : ranked) {
    Offer o;
    o.id = "meta:" + std::to_string(++n);
    o.stage = SelectionStage::kMetas;
    o.words = c.payload.words;
    for (const auto& w : o.words) o.label += (o.label.empty() ? "" : " ") + w;
    o.score = c.score;
    o.source = to_string(c.source);
    s.meta_offers[o.id] = c.payload;
    s.offers.push_back(std::move(o));
  }
  s.info.state = SessionState::kMetasOffered;
}

void SessionService::offer_concepts(Session& s) {
  const auto ranked = recommend_concepts(selection_context(s, true), *res_.ontology, config_.recommender.concept_k);
  s.offers.clear();
  s.concept_offers.clear();
  for (const auto& c : ranked) {
    Offer o;
    o.id = "concept:" + c.payload.concept_id;
    o.stage = SelectionStage::kConcepts;
    o.label = c.payload.label;
    o.words = c.payload.related_terms;
    o.score = c.score;
    o.source = to_string(c.source);
    s.concept_offers[o.id] = c.payload;
    s.offers.push_back(std::move(o));
  }
  s.info.state = SessionState::kConceptsOffered;
}

void SessionService::show_results(Session& s) {
  s.query = build_query(s.entry.query_keywords, s.chosen_senses, s.chosen_metas, s.chosen_concepts,
                        config_.query_cap);
  s.query_text = serialize_query(*s.query);
  TermVector context = selection_context(s, true);
  for (const auto& c : s.chosen_concepts) context.add(TermVector::counts(c.related_terms));
  s.hits = search_ranked(*s.query, context, *res_.index, config_.page_size, 1);
  s.page = 1;
  s.counted_pages = {1};
  s.metrics.hits += static_cast<std::int64_t>(s.hits.size());
  for (const auto& h : s.hits) s.presented_urls.push_back(h.url);
  s.offers.clear();
  s.info.state = SessionState::kResultsShown;
}

StageView SessionService::apply_selection(const std::string& session_id, SelectionStage stage,
                                          const std::vector<std::string>& offer_ids) {
  auto sp = find(session_id);
  auto& s = *sp;
  std::lock_guard lock(s.mutex);
  const auto state = s.info.state;
  if (s.info.phase == Phase::kOS3) throw StateError("OS3 sessions have no selection stages");
  if (state != SessionState::kSensesOffered && state != SessionState::kMetasOffered &&
      state != SessionState::kConceptsOffered) {
    throw StateError(std::string("no selection stage is open in state ") + to_string(state));
  }
  auto stage_of = [](SessionState st) {
    return st == SessionState::kSensesOffered ? 0 : st == SessionState::kMetasOffered ? 1 : 2;
  };
  const int current = stage_of(state);
  const int target = static_cast<int>(stage);
  if (target < current) {
    throw StateError(std::string("stage ") + to_string(stage) + " already passed in state " + to_string(state));
  }
  Session probe_offers;
  const auto* ids_source = &s;
  if (target > current) {
    probe_offers.entry = s.entry;
    probe_offers.profile = s.profile;
    probe_offers.sckb = s.sckb;
    probe_offers.chosen_senses = s.chosen_senses;
    probe_offers.chosen_metas = s.chosen_metas;
    if (current < 1) offer_metas(probe_offers);
    if (target == 2) offer_concepts(probe_offers);
    ids_source = &probe_offers;
  }
  for (const auto& id : offer_ids) {
    const bool known = stage == SelectionStage::kSenses   ? ids_source->sense_offers.contains(id)
                       : stage == SelectionStage::kMetas ? ids_source->meta_offers.contains(id)
                                                         : ids_source->concept_offers.contains(id);
    if (!known) throw ValidationError("unknown offer id '" + id + "' for stage " + to_string(stage));
  }
  if (target > current) {
    s.offers = std::move(probe_offers.offers);
    s.meta_offers = std::move(probe_offers.meta_offers);
    s.concept_offers = std::move(probe_offers.concept_offers);
    s.info.state = probe_offers.info.state;
  }

  std::vector<std::string> ids;
  for (const auto& id : offer_ids) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  s.metrics.clicks += static_cast<std::int64_t>(ids.size());
  switch (stage) {
    case SelectionStage::kSenses:
      for (const auto& id : ids) s.chosen_senses.push_back(s.sense_offers.at(id));
      s.entry.selected_terms = s.chosen_senses;
      offer_metas(s);
      break;
    case SelectionStage::kMetas:
      for (const auto& id : ids) s.chosen_metas.push_back(s.meta_offers.at(id));
      s.entry.selected_meta_keywords = s.chosen_metas;
      offer_concepts(s);
      break;
    case SelectionStage::kConcepts:
      for (const auto& id : ids) {
        const auto& c = s.concept_offers.at(id);
        s.chosen_concepts.push_back(c);
        s.entry.selected_concepts.push_back({c.concept_id, normalize_text(c.label, *res_.stopwords)});
      }
      show_results(s);
      break;
  }
  return view(s);
}

StageView SessionService::current(const std::string& session_id) {
  auto sp = find(session_id);
  std::lock_guard lock(sp->mutex);
  return view(*sp);
}

StageView SessionService::results(const std::string& session_id, std::size_t page) {
  auto sp = find(session_id);
  auto& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.info.state != SessionState::kResultsShown) {
    throw StateError(std::string("no results in state ") + to_string(s.info.state));
  }
  if (page == 0) throw ValidationError("pages are numbered from 1");
  if (s.info.phase == Phase::kOS3) {
    s.hits = res_.baseline->submit(s.query_text, page);
  } else {
    TermVector context = selection_context(s, true);
    for (const auto& c : s.chosen_concepts) context.add(TermVector::counts(c.related_terms));
    s.hits = search_ranked(*s.query, context, *res_.index, config_.page_size, page);
  }
  s.page = page;
  if (s.counted_pages.insert(page).second) s.metrics.hits += static_cast<std::int64_t>(s.hits.size());
  for (const auto& h : s.hits) {
    if (std::find(s.presented_urls.begin(), s.presented_urls.end(), h.url) == s.presented_urls.end()) {
      s.presented_urls.push_back(h.url);
    }
  }
  return view(s);
}

SessionMetrics SessionService::report_click(const std::string& session_id, const std::string& url) {
  auto sp = find(session_id);
  auto& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.info.state == SessionState::kCompleted) throw StateError("session " + session_id + " is completed");
  if (std::find(s.presented_urls.begin(), s.presented_urls.end(), url) == s.presented_urls.end()) {
    throw ValidationError("url '" + url + "' was not presented in this session");
  }
  if (s.info.phase != Phase::kOS3 && s.round_open) {
    PersonalProfile scratch{s.info.user_id, {}, {}};
    const auto* doc = res_.index->doc_by_url(url);
    const PageMetadata page = doc ? doc->metadata : PageMetadata{url, {}, {}, {}};
    s.entry = record_click(scratch, std::move(s.entry), url, page, {&s.presented_urls, res_.stopwords.get()});
  }
  ++s.metrics.clicks;
  if (s.clicked_urls.insert(url).second) ++s.metrics.urls;
  auto m = s.metrics;
  m.elapsed_ms = clock_->now_ms() - s.info.started_at_ms;
  return m;
}

SessionMetrics SessionService::complete_task(const std::string& session_id, bool found) {
  auto sp = find(session_id);
  auto& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.info.state == SessionState::kCompleted) throw StateError("session " + session_id + " already completed");
  close_round(s);
  const auto now = clock_->now_ms();
  s.info.completed_at_ms = now;
  s.info.found = found;
  s.metrics.elapsed_ms = now - s.info.started_at_ms;
  s.info.state = SessionState::kCompleted;
  s.offers.clear();
  return s.metrics;
}

SessionMetrics SessionService::metrics(const std::string& session_id) {
  auto sp = find(session_id);
  std::lock_guard lock(sp->mutex);
  auto m = sp->metrics;
  if (!sp->info.completed_at_ms) m.elapsed_ms = clock_->now_ms() - sp->info.started_at_ms;
  return m;
}

SessionInfo SessionService::info(const std::string& session_id) {
  auto sp = find(session_id);
  std::lock_guard lock(sp->mutex);
  auto i = sp->info;
  return i;
}

StageView SessionService::view(const Session& s) const {
  StageView v;
  v.session_id = s.info.session_id;
  v.state = s.info.state;
  v.offers = s.offers;
  v.query = s.query_text;
  v.page = s.page;
  v.hits = s.hits;
  v.metrics = s.metrics;
  v.metrics.elapsed_ms =
      s.info.completed_at_ms ? *s.info.completed_at_ms - s.info.started_at_ms : clock_->now_ms() - s.info.started_at_ms;
  return v;
}

}  // namespace ctxsearch
