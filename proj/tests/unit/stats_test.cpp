#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "ctxsearch/error.hpp"
#include "ctxsearch/stats.hpp"
#include "support.hpp"

#ifdef CTXSEARCH_HAVE_BOOST_MATH
#include <boost/math/special_functions/gamma.hpp>
#endif

using namespace ctxsearch;

namespace {

std::vector<double> split_doubles(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(std::stod(item));
  return out;
}

}  // namespace

TEST_CASE("kruskal-wallis reference value") {
  const auto oracle = nlohmann::json::parse(testing::read_file(testing::test_data_dir() / "oracle_values.json"));
  const auto r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  CHECK(r.h == doctest::Approx(7.2).epsilon(1e-12));
  CHECK(std::abs(r.h - oracle["kw_123"]["h"].get<double>()) < 1e-9);
  CHECK(std::abs(r.p - oracle["kw_123"]["p"].get<double>()) < 1e-9);
  CHECK(r.df == 2);
}

TEST_CASE("kruskal-wallis agrees with scipy") {
  std::ifstream in(testing::test_data_dir() / "kruskal_scipy.tsv");
  REQUIRE(in);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string groups_text, h_text, p_text;
    std::getline(ss, groups_text, '\t');
    std::getline(ss, h_text, '\t');
    std::getline(ss, p_text, '\t');
    std::vector<std::vector<double>> groups;
    std::stringstream gs(groups_text);
    std::string g;
    while (std::getline(gs, g, '|')) groups.push_back(split_doubles(g, ','));
    const auto r = kruskal_wallis(groups);
    CAPTURE(groups_text);
    CHECK(std::abs(r.h - std::stod(h_text)) < 1e-9);
    CHECK(std::abs(r.p - std::stod(p_text)) < 1e-9);
    ++rows;
  }
  CHECK(rows >= 30);
}

TEST_CASE("kruskal-wallis edge cases and invariances") {
  const auto same = kruskal_wallis({{2, 2, 2}, {2, 2}, {2}});
  CHECK(same.h == 0.0);
  CHECK(same.p == 1.0);
  const auto identical = kruskal_wallis({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  CHECK(identical.h == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(identical.p == doctest::Approx(1.0));
  CHECK_THROWS_AS(kruskal_wallis({{1, 2}}), ValidationError);
  CHECK_THROWS_AS(kruskal_wallis({{1, 2}, {}}), ValidationError);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<double>> groups(2 + rng() % 3);
    for (auto& g : groups) {
      for (std::size_t j = 0; j < 1 + rng() % 6; ++j) g.push_back(static_cast<double>(rng() % 7));
    }
    const auto base = kruskal_wallis(groups);
    auto shuffled = groups;
    for (auto& g : shuffled) std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(kruskal_wallis(shuffled).h - base.h) < 1e-9);
    auto transformed = groups;
    for (auto& g : transformed) {
      for (auto& v : g) v = std::exp(v) * 3.0 + 1.0;
    }
    CHECK(std::abs(kruskal_wallis(transformed).h - base.h) < 1e-9);
    CHECK(base.h >= 0.0);
    CHECK(base.p >= 0.0);
    CHECK(base.p <= 1.0);
  }
}

TEST_CASE("chi-square upper tail") {
  for (double x : {0.0, 0.1, 1.0, 2.5, 7.2, 15.0, 40.0}) {
    CAPTURE(x);
    CHECK(std::abs(chi_square_upper_tail(x, 2) - std::exp(-x / 2.0)) < 1e-12);
  }
  CHECK(chi_square_upper_tail(0.0, 4) == 1.0);
  CHECK(regularized_gamma_q(1.0, 3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
#ifdef CTXSEARCH_HAVE_BOOST_MATH
  for (int df = 1; df <= 6; ++df) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 4.0, 9.5, 25.0, 80.0}) {
      CAPTURE(df);
      CAPTURE(x);
      const double expected = boost::math::gamma_q(df / 2.0, x / 2.0);
      CHECK(std::abs(chi_square_upper_tail(x, df) - expected) < 1e-12);
    }
  }
#endif
}
