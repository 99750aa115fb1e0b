#include <set>
#include <sstream>

#include "aspectscope/corpus.hpp"
#include "aspectscope/text.hpp"
#include "doctest.h"
#include "support/support.hpp"

using namespace aspectscope;

namespace {

// Hand tally against the shipped list file, read directly.
double stopword_ratio(const std::string& text) {
  std::set<std::string> words;
  std::istringstream list(asc_test::read_file(asc_test::data_dir() / "../../data/stopwords_en.txt"));
  for (std::string line; std::getline(list, line);) {
    if (!line.empty() && line[0] != '#') words.insert(line);
  }
  std::istringstream in(text);
  double hits = 0, total = 0;
  for (std::string w; in >> w; ++total) hits += words.count(w) ? 1 : 0;
  return total == 0 ? 0 : hits / total;
}

std::vector<std::string> texts(const std::vector<Sentence>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

}  // namespace

TEST_CASE("is_english") {
  CHECK_FALSE(is_english(""));
  const std::string en = "the virus was detected in the majority of the patients in this cohort";
  const std::string es = "el virus fue detectado en la mayoría de los pacientes";
  CHECK(stopword_ratio(en) >= 0.08);
  CHECK(stopword_ratio(es) < 0.08);
  CHECK(is_english(en));
  CHECK_FALSE(is_english(es));
  CHECK_FALSE(is_english("the of and in"));  // fewer than five words
  CHECK(is_english("The virus, as expected, was found."));
}

TEST_CASE("segment_sentences") {
  CHECK(segment_sentences("").empty());
  CHECK(texts(segment_sentences("Results were good. We conclude X.")) ==
        std::vector<std::string>{"Results were good.", "We conclude X."});
  const auto fig = segment_sentences("Fig. 2 shows binding. It is strong.");
  REQUIRE(fig.size() == 2);
  CHECK(fig[0].text == "Fig. 2 shows binding.");
  CHECK(texts(segment_sentences("As shown by Smith et al. The effect held.")).size() == 1);
  CHECK(texts(segment_sentences("Is it safe? Yes! 40 patients agreed.")).size() == 3);
  CHECK(texts(segment_sentences("Levels rose. then fell.")).size() == 1);  // lowercase start
  CHECK(texts(segment_sentences("Values were 3.5 and 2.1 in total.")).size() == 1);

  SegmenterOptions custom;
  custom.abbreviations = {"approx."};
  CHECK(texts(segment_sentences("See Fig. 2 here.", custom)).size() == 2);
}

TEST_CASE("sentence spans partition the abstract") {
  const std::string csv = asc_test::read_file(asc_test::data_dir() / "fixture_100.csv");
  std::istringstream in(csv);
  const auto table = parse_metadata(in);
  REQUIRE(table.records.size() > 50);
  for (const auto& r : table.records) {
    const std::string& a = r.abstract;
    const auto sentences = segment_sentences(a);
    std::size_t cursor = 0;
    for (const auto& s : sentences) {
      REQUIRE(s.char_start >= cursor);
      REQUIRE(s.char_start < s.char_end);
      REQUIRE(s.char_end <= a.size());
      for (std::size_t i = cursor; i < s.char_start; ++i) CHECK(is_space_byte(a[i]));
      CHECK(a.substr(s.char_start, s.char_end - s.char_start) == s.text);
      cursor = s.char_end;
    }
    for (std::size_t i = cursor; i < a.size(); ++i) CHECK(is_space_byte(a[i]));
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("Introduction: the virus spreads") ==
        std::vector<std::string>{"virus", "spreads"});
  CHECK(tokenize("COVID-19 spike") == std::vector<std::string>{"covid-19", "spike"});
  CHECK(tokenize("-leading trailing- a x2") == std::vector<std::string>{"leading", "trailing", "x2"});
  CHECK(tokenize("METHODS and Results; conclusions") .empty());
  for (const char* w : {"method", "methods", "introduction", "conclusion", "conclusions",
                        "background", "objective", "objectives", "result", "results",
                        "purpose", "finding", "findings"}) {
    CHECK(tokenizer_stopwords().contains(w));
    CHECK_FALSE(english_stopwords().contains(w));
  }
}

TEST_CASE("tokenize is idempotent on its own output") {
  const std::string csv = asc_test::read_file(asc_test::data_dir() / "fixture_100.csv");
  std::istringstream in(csv);
  for (const auto& r : parse_metadata(in).records) {
    const auto once = tokenize(r.abstract);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(tokenize(joined) == once);
    for (const auto& t : once) {
      CHECK(t == to_lower_ascii(t));
      CHECK_FALSE(tokenizer_stopwords().contains(t));
      CHECK(t.size() >= 2);
    }
  }
}

TEST_CASE("stopword parsing") {
  const auto set = StopwordSet::parse("# comment\nalpha\n\n  beta  \n");
  CHECK(set.size() == 2);
  CHECK(set.contains("alpha"));
  CHECK(set.contains("beta"));
  CHECK_FALSE(set.contains("# comment"));
}
