#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aspectscope {

struct Concept {
  std::string cui;
  std::string canonical_name;
  std::vector<std::string> synonyms;
  std::string semantic_type;
  std::string definition;

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct EntitySpan {
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string surface;
  std::string cui;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// Lowercase ASCII, trim, collapse whitespace runs to one space.
std::string normalize_form(std::string_view form);

// Dictionary matcher: an Aho-Corasick automaton over normalized surface forms.
class Gazetteer {
 public:
  // Throws kInvalidArgument for an empty list, a duplicate cui, or an empty
  // canonical name. A surface form shared by several cuis goes to the
  // smallest cui; each collision is appended to warnings.
  static Gazetteer build(std::vector<Concept> concepts,
                         std::vector<std::string>* warnings = nullptr);

  // Case-insensitive whole-word matches, overlaps resolved leftmost-longest.
  std::vector<EntitySpan> find_entities(std::string_view text) const;

  const Concept& link(std::string_view cui) const;

  const std::vector<Concept>& concepts() const noexcept { return concepts_; }
  std::size_t num_forms() const noexcept { return forms_.size(); }
  // (normalized form, cui) sorted by form.
  std::vector<std::pair<std::string, std::string>> forms() const;

 private:
  struct Node {
    std::vector<std::pair<unsigned char, std::uint32_t>> next;  // sorted by byte
    std::uint32_t fail = 0;
    std::uint32_t output = 0;  // nearest proper suffix node holding a form, 0 = none
    std::int32_t form = -1;
  };

  std::uint32_t child(std::uint32_t node, unsigned char c) const;
  std::uint32_t step(std::uint32_t node, unsigned char c) const;

  std::vector<Concept> concepts_;  // sorted by cui
  std::unordered_map<std::string, std::size_t> by_cui_;
  std::vector<std::string> forms_;         // normalized surface forms
  std::vector<std::size_t> form_concept_;  // index into concepts_
  std::vector<Node> nodes_;
};

// {cui, name, synonyms: [...], semantic_type, definition} per line.
std::vector<Concept> read_concepts_jsonl(std::istream& input);
// cui <TAB> name <TAB> synonyms joined by '|' <TAB> type <TAB> definition.
std::vector<Concept> read_concepts_tsv(std::istream& input);
// Picks the format from the first non-blank character ('{' = JSON lines).
std::vector<Concept> load_concepts(const std::string& path);

}  // namespace aspectscope
