#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "ctxsearch/error.hpp"
#include "ctxsearch/harness.hpp"
#include "ctxsearch/http_api.hpp"
#include "ctxsearch/profile_store.hpp"
#include "ctxsearch/search_core.hpp"
#include "ctxsearch/session.hpp"

namespace fs = std::filesystem;
using namespace ctxsearch;

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

std::shared_ptr<const Index> open_corpus(const fs::path& corpus, const StopwordList& stopwords) {
  if (fs::is_directory(corpus)) {
    return std::make_shared<const Index>(index_corpus(load_corpus_dir(corpus, stopwords), stopwords));
  }
  return std::make_shared<const Index>(load_index(corpus));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware search: indexing, serving, simulation and evaluation"};
  app.require_subcommand(1);

  // profile export|import
  auto* profile = app.add_subcommand("profile", "Export or import a user's profile store");
  profile->require_subcommand(1);
  std::string user, store_dir = "stores", profile_file;
  auto* exp = profile->add_subcommand("export", "Write the user's entries as JSONL");
  exp->add_option("--user", user, "User id")->required();
  exp->add_option("--store-dir", store_dir, "Store root (profiles/, sckb.jsonl)");
  exp->add_option("--out", profile_file, "Output file (default stdout)");
  auto* imp = profile->add_subcommand("import", "Replace the user's entries from JSONL");
  imp->add_option("--user", user, "User id")->required();
  imp->add_option("--store-dir", store_dir, "Store root (profiles/, sckb.jsonl)");
  imp->add_option("--in", profile_file, "Input file (default stdin)");

  // index
  auto* index = app.add_subcommand("index", "Index a directory of .html documents");
  std::string corpus_dir, index_out, stopwords_path;
  index->add_option("dir", corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  index->add_option("--out", index_out, "Index file")->required();
  index->add_option("--stopwords", stopwords_path, "Stopword list")->required()->check(CLI::ExistingFile);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the session HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1", corpus, lexicon_path, ontology_path, sckb = "on", replay, engine_url,
              engine_path = "/search";
  std::size_t page_size = 10;
  serve->add_option("--port", port, "Port (0 = any free port)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--corpus", corpus, "Index file or corpus directory")->required()->check(CLI::ExistingPath);
  serve->add_option("--lexicon", lexicon_path, "Lexicon file")->required()->check(CLI::ExistingFile);
  serve->add_option("--ontology", ontology_path, "Ontology file")->required()->check(CLI::ExistingFile);
  serve->add_option("--stopwords", stopwords_path, "Stopword list")->required()->check(CLI::ExistingFile);
  serve->add_option("--sckb", sckb, "Shared knowledge base")->check(CLI::IsMember({"on", "off"}));
  serve->add_option("--store-dir", store_dir, "Store root (profiles/, sckb.jsonl)");
  std::vector<std::string> private_users;
  serve->add_option("--private-user", private_users, "User whose entries are never shared (repeatable)");
  serve->add_option("--page-size", page_size, "Results per page")->check(CLI::PositiveNumber);
  auto* replay_opt = serve->add_option("--baseline-replay", replay, "Canned baseline results (JSON)")
                         ->check(CLI::ExistingFile);
  serve->add_option("--baseline-url", engine_url, "Remote baseline engine base URL")->excludes(replay_opt);
  serve->add_option("--baseline-path", engine_path, "Remote baseline engine search path");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run simulated subjects through one phase");
  std::string phase_name, config_path, rows_out, work_dir;
  std::uint64_t seed = 42;
  simulate->add_option("--phase", phase_name, "OS1, OS2 or OS3")->required();
  simulate->add_option("--config", config_path, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--out", rows_out, "Rows output (JSONL)")->required();
  simulate->add_option("--work-dir", work_dir, "Scratch store directory (default: next to --out)");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare phases with Kruskal-Wallis tests");
  std::vector<std::string> row_files;
  std::string report_out;
  eval->add_option("--rows", row_files, "Row files (JSONL)")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", report_out, "Report output (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp) {
      StoreRegistry stores(store_dir);
      const auto p = stores.profile(user);
      std::ofstream file;
      if (!profile_file.empty()) {
        file.open(profile_file, std::ios::binary | std::ios::trunc);
        if (!file) throw StorageError("cannot write " + profile_file);
      }
      std::ostream& out = profile_file.empty() ? std::cout : file;
      for (const auto& e : p->entries) out << entry_to_json(e) << '\n';
      std::cerr << "exported " << p->entries.size() << " entries for " << user << '\n';
    } else if (*imp) {
      std::ifstream file;
      if (!profile_file.empty()) {
        file.open(profile_file, std::ios::binary);
        if (!file) throw LoadError("cannot read " + profile_file);
      }
      std::istream& in = profile_file.empty() ? std::cin : file;
      std::vector<ProfileEntry> entries;
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          entries.push_back(entry_from_json(line));
        } catch (const ParseError& e) {
          throw ParseError(e.what(), n);
        }
      }
      StoreRegistry stores(store_dir);
      stores.replace_profile(user, std::move(entries));
      std::cerr << "imported " << stores.profile(user)->entries.size() << " entries for " << user << '\n';
    } else if (*index) {
      const auto stopwords = load_stopwords(stopwords_path);
      const auto idx = index_corpus(load_corpus_dir(corpus_dir, stopwords), stopwords);
      save_index(idx, index_out);
      std::cerr << "indexed " << idx.doc_count() << " documents into " << index_out << '\n';
    } else if (*serve) {
      SearchResources res;
      res.stopwords = std::make_shared<const StopwordList>(load_stopwords(stopwords_path));
      res.lexicon = std::make_shared<const Lexicon>(load_lexicon(lexicon_path));
      res.ontology = std::make_shared<const Ontology>(load_ontology(ontology_path));
      res.index = open_corpus(corpus, *res.stopwords);
      if (!replay.empty()) {
        res.baseline = std::make_shared<ReplaySearchAdapter>(ReplaySearchAdapter::from_file(replay));
      } else if (!engine_url.empty()) {
        res.baseline = std::make_shared<HttpSearchAdapter>(engine_url, engine_path, std::chrono::seconds(10));
      }
      ServiceConfig cfg;
      cfg.page_size = page_size;
      cfg.sckb_enabled = sckb == "on";
      cfg.private_users.insert(private_users.begin(), private_users.end());
      auto service = std::make_shared<SessionService>(res, std::make_shared<StoreRegistry>(store_dir),
                                                      std::make_shared<SystemClock>(), cfg);
      HttpApi api(service);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int bound = api.start(host, port);
      std::cerr << "listening on " << host << ':' << bound << " (" << res.index->doc_count() << " docs, sckb "
                << sckb << ")\n";
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      api.stop();
    } else if (*simulate) {
      const auto phase = parse_phase(phase_name);
      const auto cfg = load_simulation_config(config_path);
      fs::path scratch = work_dir;
      if (scratch.empty()) {
        scratch = fs::absolute(rows_out).parent_path() / (std::string(".ctxsearch-work-") + to_string(phase));
      }
      const auto rows = simulate_phase(cfg, phase, seed, scratch);
      write_rows(rows, rows_out);
      std::size_t found = 0;
      for (const auto& r : rows) found += r.found;
      std::cerr << to_string(phase) << ": " << rows.size() << " rows, " << found << " tasks found\n";
    } else if (*eval) {
      std::vector<RunRow> rows;
      for (const auto& f : row_files) {
        auto part = read_rows(f);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const auto report = aggregate_report(std::move(rows));
      std::ofstream out(report_out, std::ios::binary | std::ios::trunc);
      if (!out) throw StorageError("cannot write " + report_out);
      out << report_to_json(report) << '\n';
      for (const auto& h : report.hypotheses) {
        std::cout << h.id << ' ' << h.metric << ": H=" << h.test.h << " p=" << h.test.p
                  << (h.significant ? " significant" : "") << '\n';
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (at " << e.location() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
