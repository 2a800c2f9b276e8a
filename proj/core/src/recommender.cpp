#include "ctxsearch/recommender.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "ctxsearch/error.hpp"
#include "text_util.hpp"

namespace ctxsearch {

const char* to_string(CandidateSource source) {
  switch (source) {
    case CandidateSource::kPersonal:
      return "personal";
    case CandidateSource::kShared:
      return "shared";
    case CandidateSource::kLexiconOrder:
      return "lexicon-order";
  }
  return "unknown";
}

// --- ontology ---------------------------------------------------------------

void Ontology::add(Concept c) {
  if (c.concept_id.empty()) throw ValidationError("concept with empty id");
  if (c.related_terms.empty()) throw ValidationError("concept " + c.concept_id + " has no related terms");
  const auto id = c.concept_id;
  if (!concepts_.emplace(id, std::move(c)).second) throw ValidationError("duplicate concept id " + id);
}

void Ontology::validate() const {
  for (const auto& [id, c] : concepts_) {
    std::set<std::string> seen{id};
    const Concept* cur = &c;
    while (cur->parent_id) {
      const auto& parent = *cur->parent_id;
      auto it = concepts_.find(parent);
      if (it == concepts_.end()) throw ValidationError("concept " + cur->concept_id + " has unknown parent " + parent);
      if (!seen.insert(parent).second) throw ValidationError("parent cycle through concept " + id);
      cur = &it->second;
    }
  }
}

const Concept* Ontology::find(const std::string& concept_id) const {
  auto it = concepts_.find(concept_id);
  return it == concepts_.end() ? nullptr : &it->second;
}

Ontology load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read ontology file " + path.string());
  Ontology ontology;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(std::move(line));
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError("ontology record needs 3 or 4 tab-separated fields", line_no);
    }
    Concept c;
    c.concept_id = std::string(detail::trim(fields[0]));
    c.label = std::string(detail::trim(fields[1]));
    if (c.concept_id.empty()) throw ParseError("ontology record has empty concept id", line_no);
    if (c.label.empty()) throw ParseError("ontology record has empty label", line_no);
    std::set<std::string> seen;
    for (const auto& raw : detail::split(fields[2], ',')) {
      std::string token;
      auto flush = [&] {
        if (token.empty()) return;
        auto term = normalize_term(token);
        if (seen.insert(term).second) c.related_terms.push_back(std::move(term));
        token.clear();
      };
      for (unsigned char ch : raw) {
        if (std::isalnum(ch)) {
          token.push_back(static_cast<char>(ch));
        } else {
          flush();
        }
      }
      flush();
    }
    if (fields.size() == 4) {
      auto parent = std::string(detail::trim(fields[3]));
      if (!parent.empty()) c.parent_id = std::move(parent);
    }
    ontology.add(std::move(c));
  }
  ontology.validate();
  return ontology;
}

// --- nearest neighbour --------------------------------------------------------

NeighborIndex::NeighborIndex(std::vector<std::pair<EntryId, TermVector>> entries)
    : entries_(std::move(entries)) {
  for (std::uint32_t i = 0; i < entries_.size(); ++i) {
    for (const auto& [term, w] : entries_[i].second) postings_[term].push_back(i);
  }
}

std::vector<Neighbor> NeighborIndex::top_k(const TermVector& query, std::size_t k) const {
  if (k == 0) throw ValidationError("k must be positive");
  // Step 1: entries sharing at least one term with the query.
  std::vector<std::uint32_t> candidates;
  for (const auto& [term, w] : query) {
    auto it = postings_.find(term);
    if (it != postings_.end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Step 2: exact cosine on the candidates only.
  std::vector<Neighbor> scored;
  scored.reserve(candidates.size());
  for (auto i : candidates) {
    const double s = cosine(query, entries_[i].second);
    if (s > 0.0) scored.push_back({entries_[i].first, s});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

double NeighborIndex::best_score(const TermVector& query) const {
  const auto top = top_k(query, 1);
  return top.empty() ? 0.0 : top.front().score;
}

std::vector<Neighbor> nn_two_step(const TermVector& query,
                                  std::span<const std::pair<EntryId, TermVector>> entries,
                                  std::size_t k) {
  return NeighborIndex({entries.begin(), entries.end()}).top_k(query, k);
}

// --- recommendation -----------------------------------------------------------

namespace {

template <typename Entries>
std::vector<std::pair<EntryId, TermVector>> vectorize(const Entries& entries) {
  std::vector<std::pair<EntryId, TermVector>> out;
  out.reserve(entries.size());
  EntryId id = 0;
  for (const auto& e : entries) out.emplace_back(id++, entry_vector(e));
  return out;
}

std::pair<double, CandidateSource> combine(double personal, double shared, double shared_weight) {
  const double weighted = std::min(1.0, shared_weight * shared);
  if (weighted > personal) return {weighted, CandidateSource::kShared};
  return {std::min(1.0, personal), personal > 0.0 ? CandidateSource::kPersonal : CandidateSource::kLexiconOrder};
}

}  // namespace

ContextStores::ContextStores(const PersonalProfile& profile, const SharedKnowledgeBase* sckb)
    : profile_(profile),
      sckb_(sckb),
      personal_(vectorize(profile.entries)),
      shared_(sckb ? vectorize(sckb->entries) : std::vector<std::pair<EntryId, TermVector>>{}) {}

std::pair<double, CandidateSource> ContextStores::score(const TermVector& v, double shared_weight) const {
  const double personal = personal_.size() ? personal_.best_score(v) : 0.0;
  const double shared = shared_.size() ? shared_.best_score(v) : 0.0;
  return combine(personal, shared, shared_weight);
}

std::map<std::string, std::vector<ScoredSense>> recommend_senses(
    const std::vector<std::string>& query_keywords,
    const std::map<std::string, std::vector<DisambiguatedTerm>>& candidates,
    const ContextStores& stores, const RecommenderConfig& config) {
  std::map<std::string, std::vector<ScoredSense>> out;
  for (const auto& keyword : query_keywords) {
    if (out.contains(keyword)) continue;
    auto& ranked = out[keyword];
    auto it = candidates.find(keyword);
    if (it == candidates.end()) continue;

    std::vector<ScoredSense> matched;
    std::vector<ScoredSense> unmatched;
    for (const auto& sense : it->second) {
      auto [score, source] = stores.empty() ? std::pair{0.0, CandidateSource::kLexiconOrder}
                                            : stores.score(TermVector::unit(sense.words), config.shared_weight);
      ScoredSense s{sense, score, source};
      s.payload.score = score;
      (score > 0.0 ? matched : unmatched).push_back(std::move(s));
    }
    std::stable_sort(matched.begin(), matched.end(),
                     [](const ScoredSense& a, const ScoredSense& b) { return a.score > b.score; });
    for (auto& s : unmatched) {
      s.score = 0.0;
      s.source = CandidateSource::kLexiconOrder;
      matched.push_back(std::move(s));
    }
    if (matched.size() > config.sense_k) matched.resize(config.sense_k);
    ranked = std::move(matched);
  }
  return out;
}

std::map<std::string, std::vector<ScoredSense>> recommend_senses(
    const std::vector<std::string>& query_keywords,
    const std::map<std::string, std::vector<DisambiguatedTerm>>& candidates,
    const PersonalProfile& profile, const SharedKnowledgeBase* sckb, const RecommenderConfig& config) {
  return recommend_senses(query_keywords, candidates, ContextStores(profile, sckb), config);
}

std::vector<ScoredMetaKeyword> recommend_meta_keywords(const TermVector& context,
                                                       const PersonalProfile& profile,
                                                       const SharedKnowledgeBase* sckb,
                                                       const RecommenderConfig& config) {
  struct Origin {
    bool personal = false;
    bool shared = false;
  };
  std::map<MetaKeyword, Origin> pool;
  auto collect = [&](const std::vector<ProfileEntry>& entries, bool shared) {
    for (const auto& e : entries) {
      for (const auto* list : {&e.selected_meta_keywords, &e.extracted_meta_keywords}) {
        for (const auto& mk : *list) {
          if (mk.words.empty() || mk.words.size() > kMetaKeywordMaxWords) continue;
          auto& o = pool[mk];
          (shared ? o.shared : o.personal) = true;
        }
      }
    }
  };
  collect(profile.entries, false);
  if (sckb != nullptr) collect(sckb->entries, true);

  std::vector<ScoredMetaKeyword> scored;
  for (const auto& [mk, origin] : pool) {
    const double cos = cosine(TermVector::unit(mk.words), context);
    auto [score, source] = combine(origin.personal ? cos : 0.0, origin.shared ? cos : 0.0, config.shared_weight);
    if (score > 0.0) scored.push_back({mk, score, source});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredMetaKeyword& a, const ScoredMetaKeyword& b) { return a.score > b.score; });
  if (scored.size() > config.meta_keyword_limit) scored.resize(config.meta_keyword_limit);
  return scored;
}

std::vector<ScoredConcept> recommend_concepts(const TermVector& context, const Ontology& ontology,
                                              std::size_t k) {
  std::vector<ScoredConcept> scored;
  for (const auto& [id, c] : ontology.concepts()) {
    const double s = cosine(TermVector::unit(c.related_terms), context);
    if (s > 0.0) scored.push_back({c, s, CandidateSource::kLexiconOrder});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredConcept& a, const ScoredConcept& b) { return a.score > b.score; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace ctxsearch
