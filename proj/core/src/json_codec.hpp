#pragma once

// nlohmann/json bindings for the library's value types. Private to core.

#include <json.hpp>

#include "ctxsearch/behavior.hpp"
#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/profile_store.hpp"
#include "ctxsearch/recommender.hpp"
#include "ctxsearch/search_core.hpp"
#include "ctxsearch/error.hpp"
#include "ctxsearch/session.hpp"

namespace ctxsearch {

using json = nlohmann::json;

inline void to_json(json& j, const DisambiguatedTerm& t) {
  j = json{{"keyword", t.keyword}, {"sense_id", t.sense_id}, {"words", t.words}, {"score", t.score}};
}
inline void from_json(const json& j, DisambiguatedTerm& t) {
  j.at("keyword").get_to(t.keyword);
  j.at("sense_id").get_to(t.sense_id);
  j.at("words").get_to(t.words);
  t.score = j.value("score", 0.0);
}

inline void to_json(json& j, const MetaKeyword& m) { j = json{{"words", m.words}}; }
inline void from_json(const json& j, MetaKeyword& m) { j.at("words").get_to(m.words); }

inline void to_json(json& j, const SelectedConcept& c) {
  j = json{{"concept_id", c.concept_id}, {"label_terms", c.label_terms}};
}
inline void from_json(const json& j, SelectedConcept& c) {
  j.at("concept_id").get_to(c.concept_id);
  j.at("label_terms").get_to(c.label_terms);
}

inline void to_json(json& j, const ProfileEntry& e) {
  j = json{{"entry_id", e.entry_id},
           {"user_id", e.user_id},
           {"timestamp", e.timestamp_ms},
           {"raw_query", e.raw_query},
           {"query_keywords", e.query_keywords},
           {"selected_terms", e.selected_terms},
           {"selected_meta_keywords", e.selected_meta_keywords},
           {"selected_concepts", e.selected_concepts},
           {"clicked_urls", e.clicked_urls},
           {"extracted_meta_keywords", e.extracted_meta_keywords}};
}
inline void from_json(const json& j, ProfileEntry& e) {
  j.at("entry_id").get_to(e.entry_id);
  j.at("user_id").get_to(e.user_id);
  j.at("timestamp").get_to(e.timestamp_ms);
  j.at("raw_query").get_to(e.raw_query);
  j.at("query_keywords").get_to(e.query_keywords);
  j.at("selected_terms").get_to(e.selected_terms);
  j.at("selected_meta_keywords").get_to(e.selected_meta_keywords);
  j.at("selected_concepts").get_to(e.selected_concepts);
  j.at("clicked_urls").get_to(e.clicked_urls);
  j.at("extracted_meta_keywords").get_to(e.extracted_meta_keywords);
}

inline void to_json(json& j, const SearchHit& h) {
  j = json{{"doc_id", h.doc_id}, {"url", h.url}, {"title", h.title}, {"score", h.score}, {"rank", h.rank}};
}
inline void from_json(const json& j, SearchHit& h) {
  j.at("doc_id").get_to(h.doc_id);
  j.at("url").get_to(h.url);
  h.title = j.value("title", std::string{});
  h.score = j.value("score", 0.0);
  h.rank = j.value("rank", 0);
}

inline void to_json(json& j, const SessionMetrics& m) {
  j = json{{"queries", m.queries}, {"clicks", m.clicks}, {"hits", m.hits}, {"urls", m.urls},
           {"elapsed_ms", m.elapsed_ms}};
}
inline void from_json(const json& j, SessionMetrics& m) {
  j.at("queries").get_to(m.queries);
  j.at("clicks").get_to(m.clicks);
  j.at("hits").get_to(m.hits);
  j.at("urls").get_to(m.urls);
  j.at("elapsed_ms").get_to(m.elapsed_ms);
}

}  // namespace ctxsearch

namespace ctxsearch {

inline void to_json(json& j, const Offer& o) {
  j = json{{"id", o.id},       {"stage", to_string(o.stage)}, {"keyword", o.keyword}, {"label", o.label},
           {"words", o.words}, {"score", o.score},            {"source", o.source}};
}
inline void from_json(const json& j, Offer& o) {
  j.at("id").get_to(o.id);
  o.stage = parse_stage(j.at("stage").get<std::string>());
  o.keyword = j.value("keyword", std::string{});
  o.label = j.value("label", std::string{});
  o.words = j.value("words", std::vector<std::string>{});
  o.score = j.value("score", 0.0);
  o.source = j.value("source", std::string{});
}

inline SessionState parse_state(std::string_view s) {
  for (auto st : {SessionState::kAwaitingQuery, SessionState::kSensesOffered, SessionState::kMetasOffered,
                  SessionState::kConceptsOffered, SessionState::kResultsShown, SessionState::kCompleted}) {
    if (s == to_string(st)) return st;
  }
  throw ValidationError("unknown session state '" + std::string(s) + "'");
}

inline void to_json(json& j, const StageView& v) {
  j = json{{"schema_version", kSchemaVersion},
           {"session_id", v.session_id},
           {"state", to_string(v.state)},
           {"offers", v.offers},
           {"query", v.query},
           {"page", v.page},
           {"hits", v.hits},
           {"metrics", v.metrics}};
}
inline void from_json(const json& j, StageView& v) {
  j.at("session_id").get_to(v.session_id);
  v.state = parse_state(j.at("state").get<std::string>());
  j.at("offers").get_to(v.offers);
  j.at("query").get_to(v.query);
  j.at("page").get_to(v.page);
  j.at("hits").get_to(v.hits);
  j.at("metrics").get_to(v.metrics);
}

}  // namespace ctxsearch
