#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/session.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return CTXSEARCH_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return CTXSEARCH_TEST_DATA_DIR; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ctxsearch-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const ctxsearch::StopwordList& stopwords() {
  static const ctxsearch::StopwordList list(
      {"a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "in", "is", "it", "of", "on", "or",
       "that", "the", "this", "to", "was", "with"});
  return list;
}

/// Lexicon, ontology, stopwords and index of the shipped 100-document fixture,
/// loaded once.
inline const ctxsearch::SearchResources& fixture_resources() {
  static const ctxsearch::SearchResources res = [] {
    using namespace ctxsearch;
    SearchResources r;
    r.stopwords = std::make_shared<const StopwordList>(load_stopwords(data_dir() / "stopwords.txt"));
    r.lexicon = std::make_shared<const Lexicon>(load_lexicon(data_dir() / "lexicon.tsv"));
    r.ontology = std::make_shared<const Ontology>(load_ontology(data_dir() / "ontology.tsv"));
    r.index = std::make_shared<const Index>(index_corpus(load_corpus_dir(data_dir() / "corpus", *r.stopwords), *r.stopwords));
    return r;
  }();
  return res;
}

}  // namespace testing
