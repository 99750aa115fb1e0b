#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

// Text preprocessing: language check, sentence segmentation, tokenization.
//
// All routines work on UTF-8 bytes. Only ASCII letters are case-folded; any
// byte >= 0x80 counts as a letter, so multi-byte characters stay inside words
// and offsets remain byte offsets into the original text.
namespace aspectscope {

// Letters, digits, hyphen, and non-ASCII bytes.
bool is_word_byte(unsigned char c) noexcept;
bool is_space_byte(unsigned char c) noexcept;

std::string to_lower_ascii(std::string_view text);

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::unordered_set<std::string> words)
      : words_(std::move(words)) {}

  // One word per line, '#' starts a comment, blank lines ignored.
  static StopwordSet parse(std::string_view listing);

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  StopwordSet merged(const StopwordSet& other) const;

 private:
  std::unordered_set<std::string> words_;
};

// The shipped English list.
const StopwordSet& english_stopwords();
// English list plus section-header words (method, introduction, ...).
const StopwordSet& tokenizer_stopwords();

struct LanguageOptions {
  double threshold = 0.08;
  std::size_t min_words = 5;
  const StopwordSet* stopwords = nullptr;  // defaults to english_stopwords()
};

// True iff the text has at least min_words whitespace-delimited words and the
// fraction of them found in the stopword list is >= threshold. Surrounding
// punctuation is stripped from each word before lookup.
bool is_english(std::string_view text, const LanguageOptions& options = {});

struct Sentence {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct SegmenterOptions {
  // Empty means the shipped list (Fig., et al., e.g., ...).
  std::vector<std::string> abbreviations;
};

const std::vector<std::string>& default_abbreviations();

// Splits after '.', '?' or '!' when followed by whitespace and then an
// uppercase ASCII letter or digit, unless the text ending at the '.' is a
// listed abbreviation. Spans are trimmed of surrounding whitespace.
std::vector<Sentence> segment_sentences(std::string_view text,
                                        const SegmenterOptions& options = {});

// Lowercase maximal runs of letters/digits/internal hyphens, minus stopwords
// and single-character tokens.
std::vector<std::string> tokenize(std::string_view text,
                                  const StopwordSet& stopwords = tokenizer_stopwords());

std::vector<std::string_view> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace aspectscope
