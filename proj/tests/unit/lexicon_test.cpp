#include <doctest.h>

#include <json.hpp>
#include <random>
#include <set>

#include "ctxsearch/error.hpp"
#include "ctxsearch/lexicon.hpp"
#include "support.hpp"

using namespace ctxsearch;

namespace {

nlohmann::json oracle() {
  return nlohmann::json::parse(testing::read_file(testing::test_data_dir() / "oracle_values.json"));
}

Lexicon small_lexicon() {
  Lexicon lex;
  lex.add({"java", "java.n.island", "an island of Indonesia", {}});
  lex.add({"java", "java.n.coffee", "coffee brewed from beans grown in the east indies", {"joe"}});
  lex.add({"java", "java.n.platform", "a programming platform", {"jvm"}});
  lex.add({"Engines", "engine.n.motor", "a motor that converts energy", {}});
  return lex;
}

}  // namespace

TEST_CASE("normalize_text matches the reference normalizer") {
  const auto sw = load_stopwords(testing::data_dir() / "stopwords.txt");
  for (const auto& [text, expected] : oracle()["normalize"].items()) {
    CAPTURE(text);
    CHECK(normalize_text(text, sw) == expected.get<std::vector<std::string>>());
  }
}

TEST_CASE("normalize_text is idempotent") {
  const auto sw = load_stopwords(testing::data_dir() / "stopwords.txt");
  const std::vector<std::string> texts = {"Coffee coffee COFFEE agreed", "The engines were running engines",
                                          "mercury, apple & bass!!", "", "   ", "the of and"};
  for (const auto& t : texts) {
    const auto once = normalize_text(t, sw);
    std::string joined;
    for (const auto& w : once) joined += w + " ";
    CAPTURE(t);
    CHECK(normalize_text(joined, sw) == once);
  }
}

TEST_CASE("tokenize keeps duplicates, normalize drops them") {
  const auto& sw = testing::stopwords();
  CHECK(tokenize_terms("cats and cats", sw) == std::vector<std::string>{"cat", "cat"});
  CHECK(normalize_text("cats and cats", sw) == std::vector<std::string>{"cat"});
  CHECK(normalize_term("Mercury") == "mercuri");
  CHECK(normalize_term("coffee") == "coff");
}

TEST_CASE("stopword list validation") {
  CHECK_THROWS_AS(StopwordList(std::unordered_set<std::string>{}), ValidationError);
  CHECK_THROWS_AS(StopwordList({"The"}), ValidationError);
  CHECK_THROWS_AS(StopwordList({"a b"}), ValidationError);
  CHECK(StopwordList({"the"}).contains("the"));
}

TEST_CASE("stopword and lexicon loaders") {
  testing::TempDir dir;
  testing::write_file(dir / "sw.txt", "# comment\nthe\n\nof\n");
  const auto sw = load_stopwords(dir / "sw.txt");
  CHECK(sw.size() == 2);
  CHECK_THROWS_AS(load_stopwords(dir / "missing.txt"), LoadError);

  testing::write_file(dir / "lex.tsv", "# header\njava\tjava.n.island\tan island\t\njava\tjava.n.coffee\tcoffee\tjoe,mud\n");
  const auto lex = load_lexicon(dir / "lex.tsv");
  REQUIRE(lex.senses("java").size() == 2);
  CHECK(lex.senses("JAVA")[1].synonyms == std::vector<std::string>{"joe", "mud"});
  CHECK(lex.senses("python").empty());

  testing::write_file(dir / "bad.tsv", "java\tjava.n.island\n");
  try {
    load_lexicon(dir / "bad.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.location() == 1);
  }
  testing::write_file(dir / "dup.tsv", "java\tx\tgloss\t\njava\tx\tgloss\t\n");
  CHECK_THROWS_AS(load_lexicon(dir / "dup.tsv"), Error);
}

TEST_CASE("lexicon lookup by normalized term") {
  const auto lex = small_lexicon();
  CHECK(lex.senses_for_term("java").size() == 3);
  CHECK(lex.senses_for_term("engin").size() == 1);
  CHECK(lex.senses_for_term("unknown").empty());
  CHECK(lex.lemma_count() == 2);
  Lexicon bad;
  CHECK_THROWS_AS(bad.add({"x", "", "gloss", {}}), ValidationError);
  CHECK_THROWS_AS(bad.add({"x", "x.1", "", {}}), ValidationError);
}

TEST_CASE("candidate disambiguations keep lexicon order and strip keywords") {
  const auto lex = small_lexicon();
  const auto sw = load_stopwords(testing::data_dir() / "stopwords.txt");
  const auto c = candidate_disambiguations(lex, {"java", "program", "zzz"}, sw);
  REQUIRE(c.at("java").size() == 3);
  CHECK(c.at("java")[0].sense_id == "java.n.island");
  CHECK(c.at("java")[0].words == std::vector<std::string>{"island", "indonesia"});
  CHECK(c.at("java")[2].words == std::vector<std::string>{"platform", "jvm"});
  CHECK(c.at("zzz").empty());
}

TEST_CASE("candidate disambiguation filter fuzz") {
  const auto sw = load_stopwords(testing::data_dir() / "stopwords.txt");
  const std::vector<std::string> pool = {"the", "java", "island", "coffee", "of", "program", "language", "cat",
                                         "wild", "car", "engine", "bean", "and", "from", "is", "snake", "large"};
  std::mt19937_64 rng(7);
  auto pick = [&] { return pool[rng() % pool.size()]; };
  for (int iter = 0; iter < 300; ++iter) {
    Lexicon lex;
    const int lemmas = 1 + static_cast<int>(rng() % 3);
    std::vector<std::string> keywords;
    for (int l = 0; l < lemmas; ++l) {
      const auto lemma = pick();
      if (sw.contains(lemma) || lex.senses(lemma).size() > 0) continue;
      for (int s = 0; s < 3; ++s) {
        std::string gloss;
        for (int w = 0; w < 6; ++w) gloss += pick() + " ";
        lex.add({lemma, lemma + "." + std::to_string(s), gloss, {pick()}});
      }
      keywords.push_back(normalize_term(lemma));
    }
    if (keywords.empty()) continue;
    keywords.push_back(normalize_term(pick()));
    const std::set<std::string> kw_set(keywords.begin(), keywords.end());
    for (const auto& [kw, senses] : candidate_disambiguations(lex, keywords, sw)) {
      for (const auto& s : senses) {
        CHECK_FALSE(s.words.empty());
        std::set<std::string> seen;
        for (const auto& w : s.words) {
          CHECK_FALSE(sw.contains(w));
          CHECK_FALSE(kw_set.contains(w));
          CHECK(seen.insert(w).second);
        }
      }
    }
  }
}
