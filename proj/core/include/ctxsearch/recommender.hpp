#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/meta_keyword.hpp"
#include "ctxsearch/profile_store.hpp"
#include "ctxsearch/term_vector.hpp"

namespace ctxsearch {

enum class CandidateSource { kPersonal, kShared, kLexiconOrder };

const char* to_string(CandidateSource source);

template <typename Payload>
struct ScoredCandidate {
  Payload payload;
  double score = 0.0;
  CandidateSource source = CandidateSource::kLexiconOrder;
};

struct Concept {
  std::string concept_id;
  std::string label;
  std::vector<std::string> related_terms;
  std::optional<std::string> parent_id;

  bool operator==(const Concept&) const = default;
};

using ScoredSense = ScoredCandidate<DisambiguatedTerm>;
using ScoredMetaKeyword = ScoredCandidate<MetaKeyword>;
using ScoredConcept = ScoredCandidate<Concept>;

/// Domain ontology: concept id -> concept, parents acyclic and resolvable.
class Ontology {
 public:
  /// Throws ValidationError on a duplicate id or empty related terms.
  void add(Concept c);
  /// Throws ValidationError on a dangling parent or a parent cycle.
  void validate() const;

  const Concept* find(const std::string& concept_id) const;
  const std::map<std::string, Concept>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }

 private:
  std::map<std::string, Concept> concepts_;
};

/// `concept_id<TAB>label<TAB>term1,term2,...[<TAB>parent_id]` per line.
/// Related terms are normalized (lowercased, stemmed).
Ontology load_ontology(const std::filesystem::path& path);

using EntryId = std::uint64_t;

struct Neighbor {
  EntryId id = 0;
  double score = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Two-step nearest-neighbour search over sparse term vectors. Step one
/// gathers the entries sharing at least one term with the query through an
/// inverted index; step two scores only those with exact cosine. Entries with
/// no shared term have cosine 0 and are never returned, so the result equals
/// an exhaustive cosine top-k.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  explicit NeighborIndex(std::vector<std::pair<EntryId, TermVector>> entries);

  /// Top `k` entries by cosine, descending, ties by ascending id; zero scores
  /// excluded. Throws ValidationError when k == 0.
  std::vector<Neighbor> top_k(const TermVector& query, std::size_t k) const;
  /// Highest cosine against any entry (0 when none overlap).
  double best_score(const TermVector& query) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<EntryId, TermVector>> entries_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

std::vector<Neighbor> nn_two_step(const TermVector& query,
                                  std::span<const std::pair<EntryId, TermVector>> entries,
                                  std::size_t k);

struct RecommenderConfig {
  double shared_weight = 1.0;
  std::size_t meta_keyword_limit = kMetaKeywordsPerPage;
  std::size_t sense_k = 5;
  std::size_t concept_k = 5;
};

/// Nearest-neighbour view of a profile and an optional SCKB snapshot. Build
/// once per snapshot and reuse across recommendation calls.
class ContextStores {
 public:
  ContextStores(const PersonalProfile& profile, const SharedKnowledgeBase* sckb);

  /// max(personal best, shared_weight * shared best) clamped to 1, and which
  /// store supplied it.
  std::pair<double, CandidateSource> score(const TermVector& v, double shared_weight) const;

  const PersonalProfile& profile() const { return profile_; }
  const SharedKnowledgeBase* sckb() const { return sckb_; }
  bool empty() const { return personal_.size() == 0 && shared_.size() == 0; }

 private:
  const PersonalProfile& profile_;
  const SharedKnowledgeBase* sckb_;
  NeighborIndex personal_;
  NeighborIndex shared_;
};

/// Ranks each keyword's senses by their best match in the stores. Senses
/// without any match keep lexicon order after the matched ones and are
/// tagged kLexiconOrder. At most config.sense_k per keyword.
std::map<std::string, std::vector<ScoredSense>> recommend_senses(
    const std::vector<std::string>& query_keywords,
    const std::map<std::string, std::vector<DisambiguatedTerm>>& candidates,
    const ContextStores& stores, const RecommenderConfig& config);

/// Convenience overload building the stores view for one call.
std::map<std::string, std::vector<ScoredSense>> recommend_senses(
    const std::vector<std::string>& query_keywords,
    const std::map<std::string, std::vector<DisambiguatedTerm>>& candidates,
    const PersonalProfile& profile, const SharedKnowledgeBase* sckb, const RecommenderConfig& config);

/// Pools selected and extracted meta keywords of all store entries, scores
/// each distinct word list by cosine against `context`, and returns the best
/// config.meta_keyword_limit with a positive score.
std::vector<ScoredMetaKeyword> recommend_meta_keywords(const TermVector& context,
                                                       const PersonalProfile& profile,
                                                       const SharedKnowledgeBase* sckb,
                                                       const RecommenderConfig& config);

/// Concepts by cosine of their unit-weight related terms against `context`;
/// zero scores dropped; ties by concept id.
std::vector<ScoredConcept> recommend_concepts(const TermVector& context, const Ontology& ontology,
                                              std::size_t k);

}  // namespace ctxsearch
