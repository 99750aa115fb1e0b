#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aspectscope {

// Rhetorical role of an abstract sentence. The enumerator order is the
// tie-break order used by the classifier.
enum class AspectLabel : std::size_t {
  kBackground = 0,
  kPurpose = 1,
  kMethod = 2,
  kFinding = 3,
  kOther = 4,
};

inline constexpr std::size_t kNumAspectLabels = 5;

inline constexpr std::array<AspectLabel, kNumAspectLabels> kAllAspectLabels = {
    AspectLabel::kBackground, AspectLabel::kPurpose, AspectLabel::kMethod,
    AspectLabel::kFinding, AspectLabel::kOther};

std::string_view aspect_label_name(AspectLabel label);

// Accepts the five lowercase names plus "finding/contribution" and
// "contribution" as aliases of finding. Case-insensitive.
std::optional<AspectLabel> parse_aspect_label(std::string_view name);

// Text scope a topic model or search is restricted to.
enum class Scope : std::size_t {
  kBackground = 0,
  kPurpose = 1,
  kMethod = 2,
  kFinding = 3,
  kWhole = 4,
};

inline constexpr std::array<Scope, 5> kAllScopes = {
    Scope::kBackground, Scope::kPurpose, Scope::kMethod, Scope::kFinding,
    Scope::kWhole};

std::string_view scope_name(Scope scope);
std::optional<Scope> parse_scope(std::string_view name);

// Scope::kWhole has no sentence label.
std::optional<AspectLabel> scope_label(Scope scope);

// One of the ten (scope x covid) model slots.
struct SlotId {
  Scope scope = Scope::kWhole;
  bool covid_only = false;

  std::string name() const;  // e.g. "finding-covid", "whole-all"
  static std::optional<SlotId> parse(std::string_view name);

  friend bool operator==(const SlotId&, const SlotId&) = default;
  friend auto operator<=>(const SlotId&, const SlotId&) = default;
};

std::vector<SlotId> all_slots();

}  // namespace aspectscope
