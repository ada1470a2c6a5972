#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace zdebias {

/// Three-way NLI label with a fixed index mapping:
/// entailment=0, neutral=1, contradiction=2.
enum class Label : int {
  entailment = 0,
  neutral = 1,
  contradiction = 2,
};

inline constexpr int kNumLabels = 3;

constexpr int to_index(Label l) { return static_cast<int>(l); }

constexpr Label label_from_index(int i) { return static_cast<Label>(i); }

inline constexpr std::array<Label, 3> all_labels{
    Label::entailment, Label::neutral, Label::contradiction};

/// Lowercase canonical name, used on write.
inline std::string_view label_name(Label l) {
  switch (l) {
    case Label::entailment: return "entailment";
    case Label::neutral: return "neutral";
    case Label::contradiction: return "contradiction";
  }
  return "?";
}

/// Case-insensitive parse. Returns nullopt for unknown strings.
std::optional<Label> parse_label(std::string_view s);

}  // namespace zdebias
