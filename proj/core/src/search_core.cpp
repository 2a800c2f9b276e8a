#include "ctxsearch/search_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>

#include "ctxsearch/error.hpp"
#include "json_codec.hpp"
#include "text_util.hpp"

namespace ctxsearch {

namespace {
constexpr std::string_view kIndexMagic = "CTXIDX1";
}

// --- index --------------------------------------------------------------------

std::size_t Index::doc_freq(const std::string& term) const { return postings(term).size(); }

double Index::idf(const std::string& term) const {
  const auto df = doc_freq(term);
  if (df == 0) return 0.0;
  return std::log(static_cast<double>(docs_.size()) / static_cast<double>(df));
}

const std::vector<DocId>& Index::postings(const std::string& term) const {
  static const std::vector<DocId> kNone;
  auto it = postings_.find(term);
  return it == postings_.end() ? kNone : it->second;
}

const Index::DocInfo* Index::doc(DocId id) const {
  auto it = docs_.find(id);
  return it == docs_.end() ? nullptr : &it->second;
}

const Index::DocInfo* Index::doc_by_url(const std::string& url) const {
  auto it = by_url_.find(url);
  return it == by_url_.end() ? nullptr : doc(it->second);
}

void Index::add(DocId id, DocInfo info) {
  if (docs_.contains(id)) throw ValidationError("duplicate doc id " + std::to_string(id));
  by_url_.try_emplace(info.url, id);
  docs_.emplace(id, std::move(info));
}

void Index::finish() {
  postings_.clear();
  for (const auto& [id, info] : docs_) {
    for (const auto& [term, count] : info.term_counts) postings_[term].push_back(id);
  }
  for (auto& [id, info] : docs_) {
    info.tfidf = TermVector{};
    for (const auto& [term, count] : info.term_counts) info.tfidf.add(term, count * idf(term));
  }
}

Index index_corpus(const std::vector<Document>& docs, const StopwordList& stopwords) {
  Index index;
  for (const auto& d : docs) {
    Index::DocInfo info;
    info.url = d.url;
    info.title = d.title;
    info.metadata = d.metadata;
    info.term_counts = TermVector::counts(d.body_terms);
    info.term_counts.add(TermVector::counts(tokenize_terms(d.title, stopwords)));
    for (const auto& raw : d.metadata.meta_keywords_raw) {
      info.term_counts.add(TermVector::counts(tokenize_terms(raw, stopwords)));
    }
    index.add(d.doc_id, std::move(info));
  }
  index.finish();
  return index;
}

std::vector<Document> load_corpus_dir(const std::filesystem::path& dir, const StopwordList& stopwords) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("corpus directory " + dir.string() + " not found");
  std::map<std::string, std::string> manifest;
  if (const auto mpath = dir / "manifest.tsv"; std::filesystem::exists(mpath)) {
    std::ifstream in(mpath);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = detail::strip_cr(std::move(line));
      if (detail::trim(line).empty() || line.front() == '#') continue;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2) throw ParseError("manifest needs filename<TAB>url", line_no);
      manifest[std::string(detail::trim(fields[0]))] = std::string(detail::trim(fields[1]));
    }
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".html") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  DocId next_id = 1;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw LoadError("cannot read " + f.string());
    const std::string html((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto name = f.filename().string();
    auto it = manifest.find(name);
    Document d;
    d.doc_id = next_id++;
    d.url = it != manifest.end() ? it->second : "corpus://" + name;
    d.metadata = extract_page_metadata(html, d.url);
    d.title = d.metadata.title;
    d.body_terms = tokenize_terms(extract_body_text(html), stopwords);
    docs.push_back(std::move(d));
  }
  return docs;
}

void save_index(const Index& index, const std::filesystem::path& path) {
  json docs = json::array();
  for (const auto& [id, info] : index.docs()) {
    json counts = json::object();
    for (const auto& [t, c] : info.term_counts) counts[t] = static_cast<long long>(std::llround(c));
    docs.push_back({{"doc_id", id},
                    {"url", info.url},
                    {"title", info.title},
                    {"meta_keywords_raw", info.metadata.meta_keywords_raw},
                    {"description", info.metadata.description},
                    {"term_counts", std::move(counts)}});
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write index " + path.string());
  out << kIndexMagic << '\n' << json{{"docs", std::move(docs)}}.dump() << '\n';
  if (!out) throw StorageError("write to index " + path.string() + " failed");
}

Index load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read index " + path.string());
  std::string header;
  std::getline(in, header);
  if (detail::strip_cr(header) != kIndexMagic) throw ParseError("missing CTXIDX1 header", 1);
  Index index;
  try {
    const auto j = json::parse(in);
    for (const auto& d : j.at("docs")) {
      Index::DocInfo info;
      info.url = d.at("url").get<std::string>();
      info.title = d.at("title").get<std::string>();
      info.metadata = {info.url, info.title, d.at("meta_keywords_raw").get<std::vector<std::string>>(),
                       d.at("description").get<std::string>()};
      for (const auto& [t, c] : d.at("term_counts").items()) info.term_counts.add(t, c.get<double>());
      index.add(d.at("doc_id").get<DocId>(), std::move(info));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed index body: ") + e.what(), 2);
  }
  index.finish();
  return index;
}

// --- evaluation ---------------------------------------------------------------

std::vector<DocId> evaluate_boolean(const BooleanQuery& q, const Index& index) {
  using Kind = QueryNode::Kind;
  switch (q.kind()) {
    case Kind::kTerm:
      return index.postings(q.text());
    case Kind::kAnd: {
      auto acc = evaluate_boolean(q.children().front(), index);
      for (std::size_t i = 1; i < q.children().size() && !acc.empty(); ++i) {
        const auto other = evaluate_boolean(q.children()[i], index);
        std::vector<DocId> out;
        std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(), std::back_inserter(out));
        acc = std::move(out);
      }
      return acc;
    }
    case Kind::kOr: {
      std::vector<DocId> acc;
      for (const auto& c : q.children()) {
        const auto other = evaluate_boolean(c, index);
        std::vector<DocId> out;
        std::set_union(acc.begin(), acc.end(), other.begin(), other.end(), std::back_inserter(out));
        acc = std::move(out);
      }
      return acc;
    }
  }
  return {};
}

std::vector<SearchHit> search_ranked(const BooleanQuery& q, const TermVector& context, const Index& index,
                                     std::size_t page_size, std::size_t page) {
  if (page_size == 0 || page == 0) return {};
  const auto candidates = evaluate_boolean(q, index);
  if (candidates.empty()) return {};

  TermVector weighted;
  for (const auto& [t, w] : context) weighted.add(t, w * index.idf(t));

  std::vector<std::string> leaves = q.leaves();
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());

  std::vector<SearchHit> hits;
  hits.reserve(candidates.size());
  for (auto id : candidates) {
    const auto* info = index.doc(id);
    double score = 0.0;
    if (!weighted.empty()) {
      score = cosine(info->tfidf, weighted);
    } else {
      for (const auto& t : leaves) {
        if (info->term_counts.weight(t) > 0.0) score += index.idf(t);
      }
    }
    hits.push_back({id, info->url, info->title, score, 0});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  const std::size_t begin = (page - 1) * page_size;
  if (begin >= hits.size()) return {};
  const std::size_t end = std::min(hits.size(), begin + page_size);
  std::vector<SearchHit> out(hits.begin() + static_cast<std::ptrdiff_t>(begin),
                             hits.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(begin + i + 1);
  return out;
}

// --- adapters -------------------------------------------------------------------

std::vector<SearchHit> LocalSearchAdapter::submit(const std::string& query, std::size_t page) {
  BooleanQuery q = [&] {
    try {
      return parse_query(query);
    } catch (const ParseError& e) {
      throw AdapterError(std::string("local engine rejected query: ") + e.what());
    }
  }();
  return search_ranked(q, TermVector::unit(q.leaves()), *index_, page_size_, page);
}

ReplaySearchAdapter ReplaySearchAdapter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read replay fixture " + path.string());
  ReplaySearchAdapter adapter;
  try {
    const auto j = json::parse(in);
    adapter.page_size_ = j.value("page_size", std::size_t{10});
    for (const auto& [query, v] : j.at("queries").items()) {
      Canned c;
      c.error = v.value("error", std::string{});
      if (v.contains("hits")) c.hits = v.at("hits").get<std::vector<SearchHit>>();
      adapter.queries_[query] = std::move(c);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed replay fixture: ") + e.what(), 1);
  }
  if (adapter.page_size_ == 0) throw ValidationError("replay fixture page_size must be positive");
  return adapter;
}

std::vector<SearchHit> ReplaySearchAdapter::submit(const std::string& query, std::size_t page) {
  auto it = queries_.find(query);
  if (it == queries_.end() || page == 0) return {};
  if (!it->second.error.empty()) throw AdapterError("replayed engine failure: " + it->second.error);
  const auto& hits = it->second.hits;
  const std::size_t begin = (page - 1) * page_size_;
  if (begin >= hits.size()) return {};
  const std::size_t end = std::min(hits.size(), begin + page_size_);
  std::vector<SearchHit> out(hits.begin() + static_cast<std::ptrdiff_t>(begin),
                             hits.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(begin + i + 1);
  return out;
}

HttpSearchAdapter::HttpSearchAdapter(std::string base_url, std::string path, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_(timeout) {}

std::vector<SearchHit> HttpSearchAdapter::submit(const std::string& query, std::size_t page) {
  httplib::Client client(base_url_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  httplib::Params params{{"q", query}, {"page", std::to_string(page)}};
  auto res = client.Get(path_, params, httplib::Headers{});
  if (!res) throw AdapterError("remote engine unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw AdapterError("remote engine answered HTTP " + std::to_string(res->status));
  try {
    auto hits = json::parse(res->body).at("hits").get<std::vector<SearchHit>>();
    return hits;
  } catch (const json::exception& e) {
    throw AdapterError(std::string("remote engine sent a malformed reply: ") + e.what());
  }
}

}  // namespace ctxsearch
