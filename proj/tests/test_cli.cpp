#include <signal.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <regex>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "support/http.hpp"
#include "support/process.hpp"
#include "support/support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using asc_test::run_process;

namespace {

std::vector<std::string> cli(std::initializer_list<std::string> args) {
  std::vector<std::string> out = {asc_test::cli_path().string()};
  out.insert(out.end(), args);
  return out;
}

const fs::path& artifacts() {
  static asc_test::TempDir dir;
  static const bool done = [] {
    const auto snap = (dir / "snap.asc").string();
    auto r = run_process(cli({"ingest", "--metadata", (asc_test::data_dir() / "fixture_100.csv").string(),
                              "--out", snap}));
    REQUIRE(r.exit_code == 0);
    r = run_process(cli({"train", "--snapshot", snap, "--out-dir", dir.path().string(), "--aspect-labels",
                         (asc_test::data_dir() / "fixture_100_labels.jsonl").string(), "--iterations",
                         "30", "--seed", "5"}));
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    r = run_process(cli({"gazetteer", "--dictionary", (asc_test::data_dir() / "concepts.jsonl").string(),
                         "--out", (dir / "gazetteer.asc").string()}));
    REQUIRE(r.exit_code == 0);
    return true;
  }();
  (void)done;
  return dir.path();
}

int listening_port(const fs::path& err_file) {
  if (!asc_test::wait_for_text(err_file, "listening on", std::chrono::seconds(20))) return 0;
  const std::string log = asc_test::read_file(err_file);
  std::smatch m;
  if (!std::regex_search(log, m, std::regex("listening on [^:\\s]+:(\\d+)"))) return 0;
  return std::stoi(m[1]);
}

}  // namespace

TEST_CASE("ingest exit codes") {
  asc_test::TempDir dir;
  auto r = run_process(cli({"ingest", "--metadata", (dir / "missing.csv").string(), "--out",
                            (dir / "s.asc").string()}));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("missing.csv") != std::string::npos);

  asc_test::write_file(dir / "empty.csv", "cord_uid,title,abstract,publish_time\n");
  r = run_process(cli({"ingest", "--metadata", (dir / "empty.csv").string(), "--out", (dir / "e.asc").string()}));
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("no papers") != std::string::npos);
  CHECK(json::parse(r.out)["kept"] == 0);

  r = run_process(cli({"ingest", "--metadata", (asc_test::data_dir() / "fixture_100.csv").string(), "--out",
                       (dir / "f.asc").string(), "--case-insensitive-covid"}));
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["kept"] == 96);

  CHECK(run_process(cli({"ingest"})).exit_code == 2);
  CHECK(run_process(cli({})).exit_code == 2);
  CHECK(run_process(cli({"--help"})).exit_code == 0);
}

TEST_CASE("train writes every slot") {
  const auto& dir = artifacts();
  const auto manifest = json::parse(asc_test::read_file(dir / "manifest.json"));
  CHECK(manifest["slots"].size() == 10);
  std::size_t bundles = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("lda-") && name.ends_with(".asc")) ++bundles;
  }
  CHECK(bundles == 10);

  asc_test::TempDir other;
  const auto r = run_process(cli({"train", "--snapshot", (other / "none.asc").string(), "--out-dir",
                                  other.path().string()}));
  CHECK(r.exit_code == 2);
  CHECK(run_process(cli({"train", "--snapshot", (dir / "snap.asc").string(), "--out-dir",
                         other.path().string(), "--preset", "quick"}))
            .exit_code == 2);
}

TEST_CASE("query") {
  const std::string art = artifacts().string();
  auto r = run_process(cli({"query", "topics", "--artifact-dir", art, "--limit", "3"}));
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["topics"].size() == 3);

  r = run_process(cli({"query", "topics", "--artifact-dir", art, "--scope", "abstract"}));
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.out).contains("error"));
  CHECK(r.err.find("bad scope") != std::string::npos);

  r = run_process(cli({"query", "search", "--artifact-dir", art, "--q", "zzzz", "--fail-empty"}));
  CHECK(r.exit_code == 1);
  r = run_process(cli({"query", "search", "--artifact-dir", art, "--q", "zzzz"}));
  CHECK(r.exit_code == 0);
  r = run_process(cli({"query", "recommend", "--artifact-dir", art, "--text", "the of and"}));
  CHECK(r.exit_code == 2);
  r = run_process(cli({"query", "paper", "--artifact-dir", art, "--gazetteer",
                       (artifacts() / "gazetteer.asc").string(), "--id", "e-covid"}));
  CHECK(r.exit_code == 0);
  CHECK_FALSE(json::parse(r.out)["entities"].empty());
  CHECK(run_process(cli({"query", "bogus", "--artifact-dir", art})).exit_code == 2);
  CHECK(run_process(cli({"query", "topics", "--artifact-dir", "/nonexistent"})).exit_code == 2);

  r = run_process(cli({"stats", "--artifact-dir", art}));
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["total"] == 96);
}

TEST_CASE("bad config") {
  asc_test::TempDir dir;
  asc_test::write_file(dir / "asc.conf", "listen_port = 80000\n");
  auto r = run_process(cli({"query", "topics", "--config", (dir / "asc.conf").string()}));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("listen_port") != std::string::npos);
  r = run_process(cli({"serve", "--config", (dir / "asc.conf").string()}));
  CHECK(r.exit_code == 2);
  asc_test::write_file(dir / "asc.conf", "colour = red\n");
  CHECK(run_process(cli({"stats", "--config", (dir / "asc.conf").string()})).exit_code == 2);
  CHECK(run_process(cli({"stats", "--config", (dir / "none.conf").string()})).exit_code == 2);
}

TEST_CASE("serve matches query byte for byte, reloads on SIGHUP and exits on SIGTERM") {
  asc_test::TempDir scratch;
  asc_test::write_file(scratch / "asc.conf", "artifact_dir = " + artifacts().string() +
                                                 "\nlisten_host = 127.0.0.1\nlisten_port = 0\n");
  const auto conf = (scratch / "asc.conf").string();
  asc_test::BackgroundProcess server(cli({"serve", "--config", conf}), scratch / "err.log");
  const int port = listening_port(scratch / "err.log");
  REQUIRE_MESSAGE(port > 0, asc_test::read_file(scratch / "err.log"));

  const auto health = asc_test::http_request(port, "GET", "/health");
  CHECK(health.status == 200);

  struct Case {
    std::vector<std::string> args;
    std::string method, target, body;
  };
  const std::vector<Case> cases = {
      {{"topics", "--limit", "4"}, "GET", "/topics?limit=4", ""},
      {{"topics", "--scope", "method", "--covid", "true"}, "GET", "/topics?scope=method&covid=true", ""},
      {{"papers", "--topic", "0", "--order", "date"}, "GET", "/topics/0/papers?order=date", ""},
      {{"search", "--q", "covid-19 swab", "--mode", "any"}, "GET", "/search?q=covid-19%20swab&mode=any", ""},
      {{"projection"}, "GET", "/projection", ""},
      {{"paper", "--id", "p001"}, "GET", "/papers/p001", ""},
      {{"recommend", "--text", "saliva swab sensitivity", "--k", "4"}, "POST", "/recommend",
       R"({"k":4,"text":"saliva swab sensitivity"})"},
  };
  for (const auto& c : cases) {
    std::vector<std::string> args = {asc_test::cli_path().string(), "query"};
    args.insert(args.end(), c.args.begin(), c.args.end());
    args.insert(args.end(), {"--config", conf});
    const auto q = run_process(args);
    const auto h = asc_test::http_request(port, c.method, c.target, c.body);
    CHECK_MESSAGE(q.exit_code == 0, c.target);
    CHECK_MESSAGE(h.status == 200, c.target);
    CHECK_MESSAGE(q.out == h.body, c.target);
  }

  // Reload mid-traffic: no request fails.
  std::atomic<int> failures{0};
  std::atomic<int> done{0};
  std::vector<std::thread> clients;
  for (int t = 0; t < 4; ++t) {
    clients.emplace_back([&] {
      for (int i = 0; i < 25; ++i) {
        if (asc_test::http_request(port, "GET", "/topics?limit=2").status != 200) ++failures;
        ++done;
      }
    });
  }
  while (done < 30) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  server.signal(SIGHUP);
  for (auto& t : clients) t.join();
  CHECK(failures == 0);
  CHECK(asc_test::wait_for_text(scratch / "err.log", "reloaded", std::chrono::seconds(10)));
  CHECK(asc_test::http_request(port, "GET", "/health").status == 200);

  server.signal(SIGTERM);
  const auto code = server.wait(std::chrono::seconds(10));
  REQUIRE(code.has_value());
  CHECK(*code == 0);
}
