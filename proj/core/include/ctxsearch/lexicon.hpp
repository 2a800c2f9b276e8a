#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ctxsearch {

/// Set of lowercase words removed during normalization.
class StopwordList {
 public:
  StopwordList() = default;
  /// Throws ValidationError if `words` is empty or holds an entry with
  /// uppercase letters or whitespace.
  explicit StopwordList(std::unordered_set<std::string> words);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

/// One lexical sense of a lemma.
struct Sense {
  std::string lemma;
  std::string sense_id;
  std::string gloss;
  std::vector<std::string> synonyms;

  bool operator==(const Sense&) const = default;
};

/// A lexicon sense reduced to the terms usable for query expansion.
struct DisambiguatedTerm {
  std::string keyword;
  std::string sense_id;
  std::vector<std::string> words;
  double score = 0.0;

  bool operator==(const DisambiguatedTerm&) const = default;
};

/// Lemma -> senses, in file order. Lookup is case-insensitive.
class Lexicon {
 public:
  /// Throws ValidationError on a duplicate (lemma, sense_id) or an empty
  /// gloss / sense id.
  void add(Sense sense);

  /// Senses of `lemma` in insertion order; empty when unknown.
  const std::vector<Sense>& senses(std::string_view lemma) const;
  /// Senses for a normalized query term: the exact lemma if present,
  /// otherwise the first lemma (in load order) whose normalized form equals
  /// `term`.
  const std::vector<Sense>& senses_for_term(std::string_view term) const;
  std::size_t lemma_count() const { return entries_.size(); }
  const std::map<std::string, std::vector<Sense>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<Sense>> entries_;
  std::map<std::string, std::string> first_lemma_by_stem_;
};

/// One word per line, `#` starts a comment line. Blank lines are skipped.
StopwordList load_stopwords(const std::filesystem::path& path);

/// `lemma<TAB>sense_id<TAB>gloss<TAB>syn1,syn2,...`, one sense per line.
/// Blank lines and `#` comment lines are skipped.
Lexicon load_lexicon(const std::filesystem::path& path);

/// Lowercase, split on non-alphanumeric runs and Porter-stem each token.
/// Stopwords are removed (tested before and after stemming); duplicates
/// are kept.
std::vector<std::string> tokenize_terms(std::string_view text, const StopwordList& stopwords);

/// tokenize_terms followed by removal of repeated terms (first occurrence
/// kept, order preserved).
std::vector<std::string> normalize_text(std::string_view text, const StopwordList& stopwords);

/// Lowercase + stem a single token without stopword filtering.
std::string normalize_term(std::string_view token);

/// For each keyword, every sense whose gloss and synonyms still contain at
/// least one term after normalization and removal of all query keywords.
/// Keywords absent from the lexicon map to an empty list.
std::map<std::string, std::vector<DisambiguatedTerm>> candidate_disambiguations(
    const Lexicon& lexicon, const std::vector<std::string>& query_keywords,
    const StopwordList& stopwords);

}  // namespace ctxsearch
