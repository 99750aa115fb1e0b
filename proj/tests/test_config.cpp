#include <cstdlib>

#include "aspectscope/config.hpp"
#include "aspectscope/error.hpp"
#include "doctest.h"
#include "support/support.hpp"

using namespace aspectscope;
namespace fs = std::filesystem;

TEST_CASE("defaults") {
  const ServiceConfig c;
  CHECK(c.listen_host == "127.0.0.1");
  CHECK(c.listen_port == 8080);
  CHECK(c.default_limit == 20);
  CHECK(c.recommend_k == 10);
  CHECK(c.topic_min_score == 0.25);
  CHECK(c.corpus_path() == fs::path(".") / "corpus.asc");
  CHECK(c.aspect_model_path() == fs::path(".") / "aspect.asc");
}

TEST_CASE("parse") {
  const auto c = parse_config(
      "# service\n"
      "listen_host = 0.0.0.0\n"
      "listen_port=9090   # trailing comment\n"
      "artifact_dir = \"models\"\n"
      "cors_origin = http://localhost:3000\n"
      "default_limit = 5\n"
      "recommend_k = 3\n"
      "topic_min_score = 0.4\n"
      "threads = 2\n"
      "\n",
      "/etc/asc");
  CHECK(c.listen_host == "0.0.0.0");
  CHECK(c.listen_port == 9090);
  CHECK(c.artifact_dir == fs::path("/etc/asc/models"));
  CHECK(c.cors_origin == "http://localhost:3000");
  CHECK(c.default_limit == 5);
  CHECK(c.recommend_k == 3);
  CHECK(c.topic_min_score == 0.4);
  CHECK(c.threads == 2);
  CHECK(c.corpus_path() == fs::path("/etc/asc/models/corpus.asc"));
  CHECK(parse_config("corpus = /abs/c.asc\n", "/etc").corpus_path() == fs::path("/abs/c.asc"));
}

TEST_CASE("bad values") {
  CHECK_THROWS_AS(parse_config("colour = blue\n"), Error);
  CHECK_THROWS_AS(parse_config("listen_port = 70000\n"), Error);
  CHECK_THROWS_AS(parse_config("listen_port = eighty\n"), Error);
  CHECK_THROWS_AS(parse_config("recommend_k = 0\n"), Error);
  CHECK_THROWS_AS(parse_config("threads = 0\n"), Error);
  CHECK_THROWS_AS(parse_config("default_limit = -1\n"), Error);
  CHECK_THROWS_AS(parse_config("just a line\n"), Error);
  try {
    parse_config("listen_port = 1\nbogus = 2\n");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("files and environment") {
  asc_test::TempDir dir;
  asc_test::write_file(dir / "asc.conf", "artifact_dir = art\nlisten_port = 1234\n");
  auto c = load_config(dir / "asc.conf");
  CHECK(c.artifact_dir == dir.path() / "art");
  CHECK_THROWS_AS(load_config(dir / "missing.conf"), Error);

  ::setenv("ASPSCOPE_LISTEN_PORT", "4321", 1);
  ::setenv("ASPSCOPE_CORS_ORIGIN", "*", 1);
  apply_env_overrides(c);
  ::unsetenv("ASPSCOPE_LISTEN_PORT");
  ::unsetenv("ASPSCOPE_CORS_ORIGIN");
  CHECK(c.listen_port == 4321);
  CHECK(c.cors_origin == "*");

  ::setenv("ASPSCOPE_THREADS", "none", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), Error);
  ::unsetenv("ASPSCOPE_THREADS");

  set_config_value(c, "recommend_k", "7");
  CHECK(c.recommend_k == 7);
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), Error);
}
