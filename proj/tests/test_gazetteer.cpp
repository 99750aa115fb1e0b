#include <sstream>

#include "aspectscope/error.hpp"
#include "aspectscope/gazetteer.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/support.hpp"

using namespace aspectscope;

namespace {

std::vector<asc_test::OracleSpan> as_oracle(const std::vector<EntitySpan>& spans) {
  std::vector<asc_test::OracleSpan> out;
  for (const auto& s : spans) out.push_back({s.char_start, s.char_end, s.cui});
  return out;
}

Gazetteer fixture_gazetteer() {
  return Gazetteer::build(load_concepts((asc_test::data_dir() / "concepts.jsonl").string()));
}

}  // namespace

TEST_CASE("normalize form") {
  CHECK(normalize_form("  Spike\t  Protein \n") == "spike protein");
  CHECK(normalize_form("ACE2") == "ace2");
  CHECK(normalize_form("") == "");
}

TEST_CASE("longest match wins") {
  const auto g = fixture_gazetteer();
  const std::string text = "The Spike protein binds ACE2; the protein is large.";
  const auto spans = g.find_entities(text);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].cui == "C0001");
  CHECK(spans[0].surface == "Spike protein");
  CHECK(spans[0].char_start == 4);
  CHECK(spans[0].char_end == 17);
  CHECK(spans[1].surface == "ACE2");
  CHECK(spans[2].cui == "C0002");
  CHECK(g.link("C0001").canonical_name == "spike protein");
  CHECK_THROWS_AS(g.link("C9999"), Error);
}

TEST_CASE("whole words only and whitespace runs") {
  const auto g = fixture_gazetteer();
  CHECK(g.find_entities("proteins and preprotein").empty());
  CHECK(g.find_entities("ace2-bound").empty());
  const std::string text = "spike\n  protein";
  const auto spans = g.find_entities(text);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].cui == "C0001");
  CHECK(spans[0].char_start == 0);
  CHECK(spans[0].char_end == text.size());
  CHECK(spans[0].surface == text);
  CHECK(g.find_entities("").empty());
}

TEST_CASE("build validation and collisions") {
  CHECK_THROWS_AS(Gazetteer::build({}), Error);
  CHECK_THROWS_AS(Gazetteer::build({{"C1", "a", {}, "", ""}, {"C1", "b", {}, "", ""}}), Error);
  CHECK_THROWS_AS(Gazetteer::build({{"C1", "  ", {}, "", ""}}), Error);
  std::vector<std::string> warnings;
  const auto g = Gazetteer::build(
      {{"C2", "cold", {"common cold"}, "", ""}, {"C1", "Cold", {"chill"}, "", ""}}, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("cold") != std::string::npos);
  const auto spans = g.find_entities("a cold day");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].cui == "C1");
  CHECK(g.num_forms() == 3);
}

TEST_CASE("matches brute force on a large dictionary") {
  const auto f = asc_test::dictionary_fixture(10000, 200, 99);
  const auto g = Gazetteer::build(f.concepts);
  CHECK(g.num_forms() == f.form_to_cui.size());
  std::size_t total = 0;
  for (const auto& s : f.sentences) {
    const auto got = g.find_entities(s);
    total += got.size();
    CHECK_MESSAGE(as_oracle(got) == asc_test::brute_entities(f.form_to_cui, s), s);
  }
  CHECK(total > 200);
}

TEST_CASE("concept file formats") {
  std::istringstream tsv(
      "C1\tcough\tdry cough|tussis\tSign or Symptom\tExpulsion of air.\n"
      "\n"
      "C2\tfever\t\tSign or Symptom\t\n");
  const auto c = read_concepts_tsv(tsv);
  REQUIRE(c.size() == 2);
  CHECK(c[0].synonyms == std::vector<std::string>{"dry cough", "tussis"});
  CHECK(c[1].synonyms.empty());
  std::istringstream bad_tsv("C1 cough\n");
  CHECK_THROWS_AS(read_concepts_tsv(bad_tsv), Error);

  std::istringstream jl("{\"cui\":\"C3\",\"name\":\"rash\",\"synonyms\":[\"eruption\"]}\n");
  const auto j = read_concepts_jsonl(jl);
  REQUIRE(j.size() == 1);
  CHECK(j[0].synonyms == std::vector<std::string>{"eruption"});
  std::istringstream bad_jl("{\"cui\": 3}\n");
  CHECK_THROWS_AS(read_concepts_jsonl(bad_jl), Error);
  CHECK_THROWS_AS(load_concepts("/nonexistent.jsonl"), Error);
  CHECK(fixture_gazetteer().concepts().size() == 8);
}
