#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <random>

#include "ctxsearch/error.hpp"
#include "ctxsearch/recommender.hpp"
#include "support.hpp"

using namespace ctxsearch;

namespace {

std::vector<Neighbor> brute_force(const TermVector& q, const std::vector<std::pair<EntryId, TermVector>>& entries,
                                  std::size_t k) {
  std::vector<Neighbor> all;
  for (const auto& [id, v] : entries) {
    const double s = cosine(q, v);
    if (s > 0.0) all.push_back({id, s});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

ProfileEntry entry(const std::string& id, std::vector<std::string> keywords) {
  ProfileEntry e;
  e.entry_id = id;
  e.user_id = "u";
  e.query_keywords = std::move(keywords);
  return e;
}

std::map<std::string, std::vector<DisambiguatedTerm>> java_candidates() {
  return {{"java",
           {{"java", "java.n.island", {"island", "indonesia"}, 0.0},
            {"java", "java.n.coffee", {"coff", "bean"}, 0.0},
            {"java", "java.n.platform", {"platform", "softwar"}, 0.0}}}};
}

}  // namespace

TEST_CASE("two-step nearest neighbours equal brute force") {
  std::mt19937_64 rng(3);
  for (int store = 0; store < 50; ++store) {
    std::vector<std::pair<EntryId, TermVector>> entries;
    const auto n = rng() % 200;
    for (std::size_t i = 0; i < n; ++i) {
      TermVector v;
      const auto terms = 1 + rng() % 6;
      for (std::size_t t = 0; t < terms; ++t) v.add("w" + std::to_string(rng() % 50), 1.0 + static_cast<double>(rng() % 3));
      entries.emplace_back(i + 1, v);
    }
    TermVector q;
    for (int t = 0; t < 3; ++t) q.add("w" + std::to_string(rng() % 50));
    const auto k = 1 + rng() % 10;
    CHECK(nn_two_step(q, entries, k) == brute_force(q, entries, k));
  }
  CHECK_THROWS_AS(NeighborIndex().top_k(TermVector::unit({"a"}), 0), ValidationError);
  CHECK(NeighborIndex().top_k(TermVector::unit({"a"}), 3).empty());
}

TEST_CASE("neighbour ties break by id") {
  std::vector<std::pair<EntryId, TermVector>> entries = {
      {9, TermVector::unit({"a"})}, {2, TermVector::unit({"a"})}, {5, TermVector::unit({"b"})}};
  const auto top = nn_two_step(TermVector::unit({"a"}), entries, 5);
  REQUIRE(top.size() == 2);
  CHECK(top[0].id == 2);
  CHECK(top[1].id == 9);
}

TEST_CASE("cold start returns lexicon order") {
  PersonalProfile empty{"new-user", {}, {}};
  const auto ranked = recommend_senses({"java"}, java_candidates(), empty, nullptr, {});
  REQUIRE(ranked.at("java").size() == 3);
  CHECK(ranked.at("java")[0].payload.sense_id == "java.n.island");
  CHECK(ranked.at("java")[1].payload.sense_id == "java.n.coffee");
  CHECK(ranked.at("java")[2].payload.sense_id == "java.n.platform");
  for (const auto& s : ranked.at("java")) {
    CHECK(s.source == CandidateSource::kLexiconOrder);
    CHECK(s.score == 0.0);
  }
  CHECK(recommend_meta_keywords(TermVector::unit({"java"}), empty, nullptr, {}).empty());
}

TEST_CASE("personal history reorders senses") {
  const auto oracle = nlohmann::json::parse(testing::read_file(testing::test_data_dir() / "oracle_values.json"));
  PersonalProfile p{"u", {entry("e1", {"java", "coff"})}, {}};
  auto ranked = recommend_senses({"java"}, java_candidates(), p, nullptr, {});
  CHECK(ranked.at("java")[0].payload.sense_id == "java.n.coffee");
  CHECK(ranked.at("java")[0].source == CandidateSource::kPersonal);
  CHECK(ranked.at("java")[1].payload.sense_id == "java.n.island");
  CHECK(ranked.at("java")[1].source == CandidateSource::kLexiconOrder);

  PersonalProfile island{"u", {entry("e1", {"java", "island"})}, {}};
  ranked = recommend_senses({"java"}, java_candidates(), island, nullptr, {});
  CHECK(ranked.at("java")[0].score == doctest::Approx(oracle["sense_island"].get<double>()).epsilon(1e-12));
}

TEST_CASE("shared knowledge contributes with its weight") {
  PersonalProfile p{"u", {entry("e1", {"java", "coff"})}, {}};
  SharedKnowledgeBase sckb;
  sckb.entries = {entry("s1", {"platform", "softwar"})};
  RecommenderConfig cfg;
  auto ranked = recommend_senses({"java"}, java_candidates(), p, &sckb, cfg);
  CHECK(ranked.at("java")[0].payload.sense_id == "java.n.platform");
  CHECK(ranked.at("java")[0].source == CandidateSource::kShared);

  cfg.shared_weight = 0.1;
  ranked = recommend_senses({"java"}, java_candidates(), p, &sckb, cfg);
  CHECK(ranked.at("java")[0].payload.sense_id == "java.n.coffee");
  CHECK(ranked.at("java")[1].payload.sense_id == "java.n.platform");
  CHECK(ranked.at("java")[1].score == doctest::Approx(0.1));
}

TEST_CASE("meta keyword recommendation") {
  auto e = entry("e1", {"java"});
  e.selected_meta_keywords = {{{"espresso", "roast"}}, {{"bean"}}};
  e.extracted_meta_keywords = {{{"unrelated"}}, {{"bean"}}};
  PersonalProfile p{"u", {e}, {}};
  SharedKnowledgeBase sckb;
  auto s = entry("s1", {"java"});
  s.selected_meta_keywords = {{{"roast", "level"}}};
  sckb.entries = {s};

  RecommenderConfig cfg;
  const auto metas = recommend_meta_keywords(TermVector::unit({"java", "roast", "bean"}), p, &sckb, cfg);
  REQUIRE(metas.size() == 3);
  CHECK(metas[0].payload.words == std::vector<std::string>{"bean"});
  CHECK(metas[1].payload.words == std::vector<std::string>{"espresso", "roast"});
  CHECK(metas[1].source == CandidateSource::kPersonal);
  CHECK(metas[2].payload.words == std::vector<std::string>{"roast", "level"});
  CHECK(metas[2].source == CandidateSource::kShared);

  cfg.meta_keyword_limit = 1;
  CHECK(recommend_meta_keywords(TermVector::unit({"roast"}), p, &sckb, cfg).size() == 1);
}

TEST_CASE("ontology loading and concept ranking") {
  const auto oracle = nlohmann::json::parse(testing::read_file(testing::test_data_dir() / "oracle_values.json"));
  testing::TempDir dir;
  testing::write_file(dir / "onto.tsv",
                      "# id\tlabel\tterms\tparent\ndrinks\tdrinks\tcoffee, espresso\nfood\tfood\tbread\n"
                      "hot\thot drinks\ttea\tdrinks\n");
  const auto onto = load_ontology(dir / "onto.tsv");
  CHECK(onto.size() == 3);
  CHECK(onto.find("hot")->parent_id == std::optional<std::string>("drinks"));
  CHECK(onto.find("drinks")->related_terms == std::vector<std::string>{"coff", "espresso"});
  CHECK(onto.find("nope") == nullptr);

  const auto ranked = recommend_concepts(TermVector::unit({"coff"}), onto, 5);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].payload.concept_id == "drinks");
  CHECK(ranked[0].score == doctest::Approx(oracle["cosine_coffee_concept"].get<double>()).epsilon(1e-12));

  testing::write_file(dir / "dangling.tsv", "a\ta\tx\tmissing\n");
  CHECK_THROWS_AS(load_ontology(dir / "dangling.tsv"), ValidationError);
  testing::write_file(dir / "cycle.tsv", "a\ta\tx\tb\nb\tb\ty\ta\n");
  CHECK_THROWS_AS(load_ontology(dir / "cycle.tsv"), ValidationError);
  testing::write_file(dir / "short.tsv", "a\ta\n");
  CHECK_THROWS_AS(load_ontology(dir / "short.tsv"), ParseError);
}
