#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctxsearch/behavior.hpp"
#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/query_builder.hpp"
#include "ctxsearch/term_vector.hpp"

namespace ctxsearch {

using DocId = std::uint32_t;

struct Document {
  DocId doc_id = 0;
  std::string url;
  std::string title;
  std::vector<std::string> body_terms;
  PageMetadata metadata;
};

struct SearchHit {
  DocId doc_id = 0;
  std::string url;
  std::string title;
  double score = 0.0;
  int rank = 0;

  bool operator==(const SearchHit&) const = default;
};

/// Inverted index with per-document term counts and TF-IDF vectors.
/// Immutable once built; concurrent queries need no locking.
class Index {
 public:
  struct DocInfo {
    std::string url;
    std::string title;
    PageMetadata metadata;
    TermVector term_counts;
    TermVector tfidf;
  };

  std::size_t doc_count() const { return docs_.size(); }
  std::size_t doc_freq(const std::string& term) const;
  /// log(N / df); 0 for unknown terms.
  double idf(const std::string& term) const;
  /// Sorted ascending; empty for unknown terms.
  const std::vector<DocId>& postings(const std::string& term) const;
  const std::map<std::string, std::vector<DocId>>& all_postings() const { return postings_; }
  const std::map<DocId, DocInfo>& docs() const { return docs_; }
  const DocInfo* doc(DocId id) const;
  const DocInfo* doc_by_url(const std::string& url) const;

 private:
  friend Index index_corpus(const std::vector<Document>&, const StopwordList&);
  friend Index load_index(const std::filesystem::path&);
  void add(DocId id, DocInfo info);
  void finish();

  std::map<std::string, std::vector<DocId>> postings_;
  std::map<DocId, DocInfo> docs_;
  std::map<std::string, DocId> by_url_;
};

/// Postings cover body terms plus normalized title and meta keyword terms.
/// Throws ValidationError on a duplicate doc id.
Index index_corpus(const std::vector<Document>& docs, const StopwordList& stopwords);

/// Every `*.html` file of `dir` in filename order, doc ids from 1. URLs come
/// from an optional `manifest.tsv` (`filename<TAB>url`), otherwise
/// `corpus://<filename>`.
std::vector<Document> load_corpus_dir(const std::filesystem::path& dir, const StopwordList& stopwords);

/// Text file starting with the line `CTXIDX1`, followed by one JSON document
/// holding the per-document metadata and term counts.
void save_index(const Index& index, const std::filesystem::path& path);
Index load_index(const std::filesystem::path& path);

/// Exact set semantics: Term -> postings, And -> intersection, Or -> union.
/// Result sorted ascending.
std::vector<DocId> evaluate_boolean(const BooleanQuery& q, const Index& index);

/// Boolean candidates ranked by cosine between the document TF-IDF vector and
/// the IDF-weighted context. With an empty (or all-zero after weighting)
/// context the score is the summed IDF of the query terms the document
/// contains. Hits ordered by score descending then doc id; `page` is 1-based
/// and ranks continue across pages.
std::vector<SearchHit> search_ranked(const BooleanQuery& q, const TermVector& context, const Index& index,
                                     std::size_t page_size, std::size_t page = 1);

/// Anything that answers a serialized Boolean query with ranked hits.
class SearchAdapter {
 public:
  virtual ~SearchAdapter() = default;
  /// `page` is 1-based; a page past the end yields no hits. Throws
  /// AdapterError when the engine fails.
  virtual std::vector<SearchHit> submit(const std::string& query, std::size_t page) = 0;
};

/// Runs queries against a local index, ranking by the query's own terms.
class LocalSearchAdapter : public SearchAdapter {
 public:
  LocalSearchAdapter(std::shared_ptr<const Index> index, std::size_t page_size)
      : index_(std::move(index)), page_size_(page_size) {}
  std::vector<SearchHit> submit(const std::string& query, std::size_t page) override;

 private:
  std::shared_ptr<const Index> index_;
  std::size_t page_size_;
};

/// Canned results from a JSON fixture:
/// `{"page_size": 10, "queries": {"<query>": {"hits": [...]} | {"error": "..."}}}`.
/// Unknown queries return no hits.
class ReplaySearchAdapter : public SearchAdapter {
 public:
  static ReplaySearchAdapter from_file(const std::filesystem::path& path);
  std::vector<SearchHit> submit(const std::string& query, std::size_t page) override;

 private:
  struct Canned {
    std::vector<SearchHit> hits;
    std::string error;
  };
  std::size_t page_size_ = 10;
  std::map<std::string, Canned> queries_;
};

/// Remote engine speaking `GET <path>?q=<query>&page=<n>` and answering
/// `{"hits": [...]}`. Off unless explicitly configured.
class HttpSearchAdapter : public SearchAdapter {
 public:
  HttpSearchAdapter(std::string base_url, std::string path, std::chrono::milliseconds timeout);
  std::vector<SearchHit> submit(const std::string& query, std::size_t page) override;

 private:
  std::string base_url_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

}  // namespace ctxsearch
