#include "ctxsearch/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <unordered_set>

#include "ctxsearch/error.hpp"
#include "ctxsearch/porter_stemmer.hpp"
#include "text_util.hpp"

namespace ctxsearch {

StopwordList::StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {
  if (words_.empty()) throw ValidationError("stopword list is empty");
  for (const auto& w : words_) {
    if (w.empty()) throw ValidationError("stopword list contains an empty entry");
    for (unsigned char c : w) {
      if (std::isspace(c) || std::isupper(c)) {
        throw ValidationError("stopword '" + w + "' is not a lowercase single word");
      }
    }
  }
}

void Lexicon::add(Sense sense) {
  sense.lemma = detail::to_lower(sense.lemma);
  if (sense.lemma.empty()) throw ValidationError("sense with empty lemma");
  if (sense.sense_id.empty()) throw ValidationError("sense of '" + sense.lemma + "' has empty id");
  if (sense.gloss.empty()) {
    throw ValidationError("sense " + sense.lemma + "/" + sense.sense_id + " has empty gloss");
  }
  auto& list = entries_[sense.lemma];
  for (const auto& s : list) {
    if (s.sense_id == sense.sense_id) {
      throw ValidationError("duplicate sense id '" + sense.sense_id + "' under '" + sense.lemma + "'");
    }
  }
  first_lemma_by_stem_.try_emplace(normalize_term(sense.lemma), sense.lemma);
  list.push_back(std::move(sense));
}

const std::vector<Sense>& Lexicon::senses(std::string_view lemma) const {
  static const std::vector<Sense> kNone;
  auto it = entries_.find(detail::to_lower(lemma));
  return it == entries_.end() ? kNone : it->second;
}

const std::vector<Sense>& Lexicon::senses_for_term(std::string_view term) const {
  const auto& exact = senses(term);
  if (!exact.empty()) return exact;
  auto it = first_lemma_by_stem_.find(std::string(term));
  return it == first_lemma_by_stem_.end() ? exact : senses(it->second);
}

StopwordList load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read stopword file " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = detail::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(detail::to_lower(w));
  }
  if (words.empty()) throw ValidationError("stopword file " + path.string() + " has no words");
  return StopwordList(std::move(words));
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read lexicon file " + path.string());
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(std::move(line));
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("lexicon record needs 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Sense sense{std::string(detail::trim(fields[0])), std::string(detail::trim(fields[1])),
                std::string(detail::trim(fields[2])), {}};
    if (sense.lemma.empty()) throw ParseError("lexicon record has empty lemma", line_no);
    if (sense.sense_id.empty()) throw ParseError("lexicon record has empty sense id", line_no);
    if (sense.gloss.empty()) throw ParseError("lexicon record has empty gloss", line_no);
    for (const auto& syn : detail::split(fields[3], ',')) {
      auto s = detail::trim(syn);
      if (!s.empty()) sense.synonyms.emplace_back(s);
    }
    lexicon.add(std::move(sense));
  }
  return lexicon;
}

std::string normalize_term(std::string_view token) {
  std::string term = detail::to_lower(token);
  // Stem to a fixpoint: coffee -> coffe -> coff.
  for (int i = 0; i < 8; ++i) {
    std::string next = porter_stem(term);
    if (next == term) break;
    term = std::move(next);
  }
  return term;
}

std::vector<std::string> tokenize_terms(std::string_view text, const StopwordList& stopwords) {
  std::vector<std::string> terms;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (!stopwords.contains(token)) {
      std::string term = normalize_term(token);
      if (!term.empty() && !stopwords.contains(term)) terms.push_back(std::move(term));
    }
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return terms;
}

std::vector<std::string> normalize_text(std::string_view text, const StopwordList& stopwords) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& term : tokenize_terms(text, stopwords)) {
    if (seen.insert(term).second) out.push_back(std::move(term));
  }
  return out;
}

std::map<std::string, std::vector<DisambiguatedTerm>> candidate_disambiguations(
    const Lexicon& lexicon, const std::vector<std::string>& query_keywords,
    const StopwordList& stopwords) {
  const std::unordered_set<std::string> keywords(query_keywords.begin(), query_keywords.end());
  std::map<std::string, std::vector<DisambiguatedTerm>> out;
  for (const auto& keyword : query_keywords) {
    auto& list = out[keyword];
    if (!list.empty()) continue;
    for (const auto& sense : lexicon.senses_for_term(keyword)) {
      std::string text = sense.gloss;
      for (const auto& syn : sense.synonyms) text += " " + syn;
      DisambiguatedTerm term{keyword, sense.sense_id, {}, 0.0};
      for (auto& w : normalize_text(text, stopwords)) {
        if (!keywords.contains(w)) term.words.push_back(std::move(w));
      }
      if (!term.words.empty()) list.push_back(std::move(term));
    }
  }
  return out;
}

}  // namespace ctxsearch
