#include <doctest.h>

#include <thread>

#include "ctxsearch/error.hpp"
#include "ctxsearch/session.hpp"
#include "support.hpp"

using namespace ctxsearch;

namespace {

struct World {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>(1000);
  std::shared_ptr<StoreRegistry> stores;
  std::shared_ptr<SessionService> service;

  explicit World(ServiceConfig cfg = {}, std::filesystem::path root = {}) {
    stores = std::make_shared<StoreRegistry>(root);
    service = std::make_shared<SessionService>(testing::fixture_resources(), stores, clock, cfg);
  }
};

std::vector<std::string> ids_for(const StageView& v, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& o : v.offers) {
    if (o.id.rfind(prefix, 0) == 0) out.push_back(o.id);
  }
  return out;
}

}  // namespace

TEST_CASE("phase and stage names") {
  CHECK(parse_phase("OS-II") == Phase::kOS2);
  CHECK(parse_phase("OS3") == Phase::kOS3);
  CHECK_THROWS_AS(parse_phase("OS4"), ValidationError);
  CHECK(std::string(to_string(Phase::kOS1)) == "OS1");
  CHECK(parse_stage("metas") == SelectionStage::kMetas);
  CHECK_THROWS_AS(parse_stage("nope"), ValidationError);
}

TEST_CASE("full OS1 round with an injected clock") {
  World w;
  const auto sid = w.service->create_session("alice", Phase::kOS1, "T1");
  CHECK_THROWS_AS(w.service->create_session("../evil", Phase::kOS1, "T1"), ValidationError);
  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kSenses, {}), StateError);

  w.clock->advance(500);
  auto v = w.service->submit_query(sid, "Jaguar");
  CHECK(v.state == SessionState::kSensesOffered);
  REQUIRE(v.offers.size() == 2);
  CHECK(v.offers[0].id == "sense:jaguar:jaguar.n.car");
  CHECK(v.offers[0].source == "lexicon-order");
  CHECK(v.metrics.elapsed_ms == 500);

  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kSenses, {"sense:bogus"}), ValidationError);
  CHECK(w.service->current(sid).state == SessionState::kSensesOffered);

  v = w.service->apply_selection(sid, SelectionStage::kSenses, {"sense:jaguar:jaguar.n.cat"});
  CHECK(v.state == SessionState::kMetasOffered);
  v = w.service->apply_selection(sid, SelectionStage::kMetas, {});
  CHECK(v.state == SessionState::kConceptsOffered);
  REQUIRE_FALSE(v.offers.empty());
  CHECK(v.offers[0].id == "concept:bigcat");
  v = w.service->apply_selection(sid, SelectionStage::kConcepts, {"concept:bigcat"});
  CHECK(v.state == SessionState::kResultsShown);
  CHECK(v.query.rfind("jaguar AND (", 0) == 0);
  REQUIRE_FALSE(v.hits.empty());
  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kConcepts, {}), StateError);

  const auto first_hits = v.metrics.hits;
  CHECK(first_hits == static_cast<std::int64_t>(v.hits.size()));
  CHECK(w.service->results(sid, 1).metrics.hits == first_hits);
  CHECK_THROWS_AS(w.service->results(sid, 0), ValidationError);

  w.clock->advance(1200);
  const auto url = v.hits[0].url;
  CHECK_THROWS_AS(w.service->report_click(sid, "https://never.shown/"), ValidationError);
  auto m = w.service->report_click(sid, url);
  m = w.service->report_click(sid, url);
  CHECK(m.clicks == 4);
  CHECK(m.urls == 1);
  CHECK(m.urls <= m.clicks);

  w.clock->advance(300);
  m = w.service->complete_task(sid, true);
  CHECK(m.queries == 1);
  CHECK(m.elapsed_ms == 2000);

  const auto info = w.service->info(sid);
  CHECK(info.found);
  CHECK(info.sckb_reads == 0);
  CHECK(info.store_writes == 2);
  CHECK(info.completed_at_ms == std::optional<std::int64_t>(3000));

  const auto profile = w.stores->profile("alice");
  REQUIRE(profile->entries.size() == 1);
  const auto& e = profile->entries[0];
  CHECK(e.raw_query == "Jaguar");
  CHECK(e.selected_terms.at(0).sense_id == "jaguar.n.cat");
  CHECK(e.selected_concepts.at(0).concept_id == "bigcat");
  CHECK(e.clicked_urls == std::vector<std::string>{url, url});
  CHECK(w.stores->sckb()->entries.size() == 1);
  CHECK(w.stores->sckb()->entries[0].user_id.empty());
}

TEST_CASE("completed sessions are immutable") {
  World w;
  const auto sid = w.service->create_session("bob", Phase::kOS2, "T1");
  auto v = w.service->submit_query(sid, "jaguar");
  w.clock->advance(40);
  const auto done = w.service->complete_task(sid, false);
  w.clock->advance(1000);
  CHECK_THROWS_AS(w.service->submit_query(sid, "jaguar"), StateError);
  CHECK_THROWS_AS(w.service->complete_task(sid, true), StateError);
  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kSenses, {}), StateError);
  CHECK(w.service->metrics(sid) == done);
  CHECK(w.service->info(sid).found == false);
  CHECK_THROWS_AS(w.service->metrics("s999"), NotFoundError);
}

TEST_CASE("forward skipping and empty queries") {
  World w;
  const auto sid = w.service->create_session("carol", Phase::kOS1, "T1");
  CHECK_THROWS_AS(w.service->submit_query(sid, "the of and"), ValidationError);
  CHECK(w.service->metrics(sid).queries == 1);

  auto v = w.service->submit_query(sid, "jaguar");
  v = w.service->apply_selection(sid, SelectionStage::kConcepts, {});
  CHECK(v.state == SessionState::kResultsShown);
  CHECK(v.query == "jaguar");

  w.service->submit_query(sid, "jaguar");
  v = w.service->apply_selection(sid, SelectionStage::kSenses, {"sense:jaguar:jaguar.n.car"});
  CHECK(v.state == SessionState::kMetasOffered);
  v = w.service->apply_selection(sid, SelectionStage::kConcepts, {"concept:sportscar"});
  CHECK(v.state == SessionState::kResultsShown);
  CHECK(v.query.find("engin") != std::string::npos);
  CHECK(v.metrics.clicks == 2);
  CHECK(v.metrics.queries == 3);

  w.service->submit_query(sid, "jaguar");
  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kConcepts, {"concept:nope"}), ValidationError);
  CHECK(w.service->current(sid).state == SessionState::kSensesOffered);
  CHECK(w.stores->profile("carol")->entries.size() == 2);
}

TEST_CASE("OS2 reads the SCKB and learns from other users") {
  World w;
  const auto a = w.service->create_session("alice", Phase::kOS2, "T1");
  w.service->submit_query(a, "jaguar");
  w.service->apply_selection(a, SelectionStage::kSenses, {"sense:jaguar:jaguar.n.cat"});
  w.service->apply_selection(a, SelectionStage::kConcepts, {});
  w.service->complete_task(a, true);
  CHECK(w.service->info(a).sckb_reads == 1);

  const auto b = w.service->create_session("bob", Phase::kOS2, "T1");
  const auto v = w.service->submit_query(b, "jaguar");
  REQUIRE_FALSE(v.offers.empty());
  CHECK(v.offers[0].id == "sense:jaguar:jaguar.n.cat");
  CHECK(v.offers[0].source == "shared");

  const auto c = w.service->create_session("carol", Phase::kOS1, "T1");
  const auto v1 = w.service->submit_query(c, "jaguar");
  CHECK(v1.offers[0].id == "sense:jaguar:jaguar.n.car");
  CHECK(w.service->info(c).sckb_reads == 0);
}

TEST_CASE("private users never reach the SCKB") {
  ServiceConfig cfg;
  cfg.private_users = {"alice"};
  World w(cfg);
  const auto a = w.service->create_session("alice", Phase::kOS2, "T1");
  w.service->submit_query(a, "jaguar");
  w.service->complete_task(a, false);
  CHECK(w.stores->profile("alice")->entries.size() == 1);
  CHECK(w.stores->sckb()->entries.empty());
  CHECK(w.service->info(a).store_writes == 1);
}

TEST_CASE("SCKB switched off") {
  ServiceConfig cfg;
  cfg.sckb_enabled = false;
  World w(cfg);
  const auto a = w.service->create_session("alice", Phase::kOS2, "T1");
  w.service->submit_query(a, "jaguar");
  w.service->complete_task(a, false);
  CHECK(w.service->info(a).sckb_reads == 0);
  CHECK(w.stores->sckb()->entries.empty());
}

TEST_CASE("OS3 goes straight to results and writes nothing") {
  World w;
  const auto sid = w.service->create_session("dave", Phase::kOS3, "T1");
  auto v = w.service->submit_query(sid, "jaguar prey");
  CHECK(v.state == SessionState::kResultsShown);
  CHECK(v.offers.empty());
  CHECK(v.query == "jaguar AND prei");
  CHECK_THROWS_AS(w.service->apply_selection(sid, SelectionStage::kSenses, {}), StateError);
  REQUIRE_FALSE(v.hits.empty());
  w.service->report_click(sid, v.hits[0].url);
  w.service->submit_query(sid, "jaguar");
  w.service->complete_task(sid, true);
  const auto info = w.service->info(sid);
  CHECK(info.store_writes == 0);
  CHECK(info.sckb_reads == 0);
  CHECK(w.stores->profile("dave")->entries.empty());
}

TEST_CASE("baseline failures surface as adapter errors") {
  class Failing : public SearchAdapter {
   public:
    std::vector<SearchHit> submit(const std::string&, std::size_t) override { throw AdapterError("down"); }
  };
  auto res = testing::fixture_resources();
  res.baseline = std::make_shared<Failing>();
  SessionService service(res, nullptr, std::make_shared<ManualClock>(), {});
  const auto sid = service.create_session("erin", Phase::kOS3, "T1");
  CHECK_THROWS_AS(service.submit_query(sid, "jaguar"), AdapterError);
  CHECK(service.current(sid).state == SessionState::kAwaitingQuery);
  CHECK(service.metrics(sid).queries == 1);
}

TEST_CASE("stores persist across registries") {
  testing::TempDir dir;
  {
    World w({}, dir.path());
    const auto sid = w.service->create_session("alice", Phase::kOS1, "T1");
    w.service->submit_query(sid, "jaguar");
    w.service->submit_query(sid, "python");
    w.service->complete_task(sid, false);
  }
  StoreRegistry reopened(dir.path());
  CHECK(reopened.profile("alice")->entries.size() == 2);
  CHECK(reopened.sckb()->entries.size() == 2);
  CHECK(std::filesystem::exists(reopened.profile_path("alice")));
}

TEST_CASE("concurrent sessions") {
  World w;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      const auto user = "user" + std::to_string(t % 3);
      for (int i = 0; i < 10; ++i) {
        const auto sid = w.service->create_session(user, t % 2 ? Phase::kOS2 : Phase::kOS1, "T1");
        w.service->submit_query(sid, i % 2 ? "jaguar" : "python snake");
        w.service->apply_selection(sid, SelectionStage::kConcepts, {});
        w.service->complete_task(sid, false);
      }
    });
  }
  for (auto& th : threads) th.join();
  std::size_t total = 0;
  for (int u = 0; u < 3; ++u) total += w.stores->profile("user" + std::to_string(u))->entries.size();
  CHECK(total == 80);
  int contributors = 0;
  for (const auto& [id, n] : w.stores->sckb()->contributor_count) contributors += n;
  CHECK(contributors == 80);
}
