#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <json.hpp>
#include <random>
#include <set>
#include <thread>

#include "ctxsearch/error.hpp"
#include "ctxsearch/search_core.hpp"
#include "support.hpp"

using namespace ctxsearch;

namespace {

Document doc(DocId id, std::vector<std::string> terms) {
  Document d;
  d.doc_id = id;
  d.url = "https://d/" + std::to_string(id);
  d.title = "";
  d.body_terms = std::move(terms);
  d.metadata.url = d.url;
  return d;
}

std::set<DocId> brute_force(const QueryNode& q, const std::vector<Document>& docs) {
  std::set<DocId> out;
  std::function<bool(const QueryNode&, const Document&)> match = [&](const QueryNode& n, const Document& d) {
    switch (n.kind()) {
      case QueryNode::Kind::kTerm:
        return std::find(d.body_terms.begin(), d.body_terms.end(), n.text()) != d.body_terms.end();
      case QueryNode::Kind::kAnd:
        return std::all_of(n.children().begin(), n.children().end(), [&](const QueryNode& c) { return match(c, d); });
      case QueryNode::Kind::kOr:
        return std::any_of(n.children().begin(), n.children().end(), [&](const QueryNode& c) { return match(c, d); });
    }
    return false;
  };
  for (const auto& d : docs) {
    if (match(q, d)) out.insert(d.doc_id);
  }
  return out;
}

QueryNode random_query(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 3 == 0) return QueryNode::term("t" + std::to_string(rng() % 10));
  std::vector<QueryNode> kids;
  const auto n = 1 + rng() % 3;
  for (std::size_t i = 0; i < n; ++i) kids.push_back(random_query(rng, depth - 1));
  return rng() % 2 ? QueryNode::all_of(std::move(kids)) : QueryNode::any_of(std::move(kids));
}

}  // namespace

TEST_CASE("boolean evaluation matches brute force") {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Document> docs;
    const auto n = rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> terms;
      for (std::size_t t = 0; t < 1 + rng() % 5; ++t) terms.push_back("t" + std::to_string(rng() % 10));
      docs.push_back(doc(static_cast<DocId>(i + 1), terms));
    }
    const auto idx = index_corpus(docs, testing::stopwords());
    const auto q = random_query(rng, 3);
    const auto got = evaluate_boolean(q, idx);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(std::set<DocId>(got.begin(), got.end()) == brute_force(q, docs));
  }
}

TEST_CASE("tf-idf ranking") {
  const auto oracle = nlohmann::json::parse(testing::read_file(testing::test_data_dir() / "oracle_values.json"));
  const auto idx = index_corpus({doc(1, {"t", "t", "x"}), doc(2, {"t", "y", "z"}), doc(3, {"u", "v", "w"})},
                                testing::stopwords());
  CHECK(idx.doc_count() == 3);
  CHECK(idx.doc_freq("t") == 2);
  CHECK(idx.idf("t") == doctest::Approx(std::log(1.5)));
  CHECK(idx.idf("nope") == 0.0);

  const auto hits = search_ranked(QueryNode::term("t"), TermVector::unit({"t"}), idx, 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].doc_id == 1);
  CHECK(hits[0].rank == 1);
  CHECK(hits[0].score == doctest::Approx(oracle["tfidf_twice"].get<double>()).epsilon(1e-12));
  CHECK(hits[1].score == doctest::Approx(oracle["tfidf_once"].get<double>()).epsilon(1e-12));

  const auto page2 = search_ranked(QueryNode::term("t"), TermVector::unit({"t"}), idx, 1, 2);
  REQUIRE(page2.size() == 1);
  CHECK(page2[0].doc_id == 2);
  CHECK(page2[0].rank == 2);
  CHECK(search_ranked(QueryNode::term("t"), {}, idx, 1, 3).empty());
  CHECK(search_ranked(QueryNode::term("t"), {}, idx, 10).size() == 2);
  CHECK_THROWS_AS(index_corpus({doc(1, {"a"}), doc(1, {"b"})}, testing::stopwords()), ValidationError);
}

TEST_CASE("corpus directory, manifest and index file") {
  testing::TempDir dir;
  testing::write_file(dir / "corpus" / "b.html",
                      "<html><head><title>Big Cats</title><meta name=\"keywords\" content=\"jaguar prey\"></head>"
                      "<body>Jaguars hunt capybara.</body></html>");
  testing::write_file(dir / "corpus" / "a.html", "<html><body>Python scripting</body></html>");
  testing::write_file(dir / "corpus" / "notes.txt", "ignored");
  testing::write_file(dir / "corpus" / "manifest.tsv", "b.html\thttps://cats.example/b\n");

  const auto docs = load_corpus_dir(dir / "corpus", testing::stopwords());
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == 1);
  CHECK(docs[0].url == "corpus://a.html");
  CHECK(docs[1].url == "https://cats.example/b");

  const auto idx = index_corpus(docs, testing::stopwords());
  CHECK(idx.postings("prei") == std::vector<DocId>{2});
  CHECK(idx.postings("big") == std::vector<DocId>{2});
  CHECK(idx.doc_by_url("https://cats.example/b")->title == "Big Cats");

  save_index(idx, dir / "idx.ctx");
  const auto loaded = load_index(dir / "idx.ctx");
  CHECK(loaded.doc_count() == 2);
  CHECK(loaded.all_postings() == idx.all_postings());
  CHECK(loaded.doc(2)->tfidf == idx.doc(2)->tfidf);
  CHECK(loaded.doc(2)->metadata == idx.doc(2)->metadata);

  testing::write_file(dir / "bad.ctx", "NOTIDX\n{}");
  CHECK_THROWS_AS(load_index(dir / "bad.ctx"), ParseError);
  CHECK_THROWS_AS(load_index(dir / "missing.ctx"), LoadError);
}

TEST_CASE("local adapter") {
  auto idx = std::make_shared<const Index>(
      index_corpus({doc(1, {"jaguar", "cat"}), doc(2, {"jaguar", "car"}), doc(3, {"snake"})}, testing::stopwords()));
  LocalSearchAdapter local(idx, 10);
  const auto hits = local.submit("jaguar AND (cat)", 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].doc_id == 1);
  CHECK(local.submit("jaguar", 1).size() == 2);
  CHECK(local.submit("jaguar", 2).empty());
  CHECK_THROWS_AS(local.submit("jaguar AND", 1), AdapterError);
}

TEST_CASE("replay adapter") {
  auto replay = ReplaySearchAdapter::from_file(testing::test_data_dir() / "replay_baseline.json");
  const auto p1 = replay.submit("jaguar", 1);
  REQUIRE(p1.size() == 2);
  CHECK(p1[0].doc_id == 7);
  CHECK(p1[1].rank == 2);
  const auto p2 = replay.submit("jaguar", 2);
  REQUIRE(p2.size() == 1);
  CHECK(p2[0].rank == 3);
  CHECK(replay.submit("jaguar", 3).empty());
  CHECK(replay.submit("python AND snake", 1).empty());
  CHECK(replay.submit("unknown", 1).empty());
  CHECK_THROWS_AS(replay.submit("broken", 1), AdapterError);

  testing::TempDir dir;
  testing::write_file(dir / "bad.json", "{\"queries\": 3");
  CHECK_THROWS_AS(ReplaySearchAdapter::from_file(dir / "bad.json"), ParseError);
}

TEST_CASE("http adapter") {
  httplib::Server server;
  server.Get("/search", [](const httplib::Request& req, httplib::Response& res) {
    const auto q = req.get_param_value("q");
    if (q == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(600));
    if (q == "fail") {
      res.status = 500;
      return;
    }
    if (q == "garbage") {
      res.set_content("not json", "text/plain");
      return;
    }
    nlohmann::json body{{"hits", {{{"doc_id", 4}, {"url", "https://r/4"}, {"title", q}, {"score", 1.0}, {"rank", 1}}}}};
    res.set_content(body.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  HttpSearchAdapter adapter(base, "/search", std::chrono::milliseconds(200));
  const auto hits = adapter.submit("jaguar AND (cat)", 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].title == "jaguar AND (cat)");
  CHECK_THROWS_AS(adapter.submit("slow", 1), AdapterError);
  CHECK_THROWS_AS(adapter.submit("fail", 1), AdapterError);
  CHECK_THROWS_AS(adapter.submit("garbage", 1), AdapterError);

  server.stop();
  th.join();
  CHECK_THROWS_AS(adapter.submit("jaguar", 1), AdapterError);
}
