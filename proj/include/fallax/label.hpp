#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fallax {

// The closed label inventory: 20 fine-grained fallacy types, 3 macro
// categories and a synthetic root. Codes are the canonical internal form;
// long display names are accepted on input.
enum class Label : std::uint8_t {
  AH,  // Ad hominem
  AA,  // Appeal to authority
  AE,  // Appeal to emotion
  CO,  // Causal oversimplification
  CP,  // Cherry picking
  CR,  // Circular reasoning
  DO,  // Doubt
  EP,  // Evading the burden of proof
  FA,  // False analogy
  FD,  // False dilemma
  FW,  // Flag waving
  HG,  // Hasty generalization
  LL,  // Loaded language
  NC,  // Name calling or labeling
  RH,  // Red herring
  SS,  // Slippery slope
  SL,  // Slogan
  ST,  // Strawman
  TC,  // Thought-terminating cliche
  VA,  // Vagueness
  INS, // Insufficient proof (macro)
  SIM, // Simplification (macro)
  DIS, // Distraction (macro)
  ROOT,
};

inline constexpr std::size_t kFineLabelCount = 20;
inline constexpr std::size_t kLabelCount = 24;

constexpr std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }
constexpr bool is_fine(Label l) { return label_index(l) < kFineLabelCount; }
constexpr bool is_macro(Label l) {
  return l == Label::INS || l == Label::SIM || l == Label::DIS;
}
constexpr bool is_root(Label l) { return l == Label::ROOT; }

inline constexpr std::array<Label, kFineLabelCount> kFineLabels = {
    Label::AH, Label::AA, Label::AE, Label::CO, Label::CP, Label::CR,
    Label::DO, Label::EP, Label::FA, Label::FD, Label::FW, Label::HG,
    Label::LL, Label::NC, Label::RH, Label::SS, Label::SL, Label::ST,
    Label::TC, Label::VA};

inline constexpr std::array<Label, 3> kMacroLabels = {Label::INS, Label::SIM,
                                                      Label::DIS};

inline std::string_view code(Label l) {
  static constexpr std::array<std::string_view, kLabelCount> codes = {
      "AH", "AA", "AE", "CO", "CP", "CR", "DO", "EP", "FA", "FD",
      "FW", "HG", "LL", "NC", "RH", "SS", "SL", "ST", "TC", "VA",
      "INS", "SIM", "DIS", "ROOT"};
  return codes[label_index(l)];
}

inline std::string_view display_name(Label l) {
  static constexpr std::array<std::string_view, kLabelCount> names = {
      "Ad hominem",
      "Appeal to authority",
      "Appeal to emotion",
      "Causal oversimplification",
      "Cherry picking",
      "Circular reasoning",
      "Doubt",
      "Evading the burden of proof",
      "False analogy",
      "False dilemma",
      "Flag waving",
      "Hasty generalization",
      "Loaded language",
      "Name calling or labeling",
      "Red herring",
      "Slippery slope",
      "Slogan",
      "Strawman",
      "Thought-terminating cliché",
      "Vagueness",
      "Insufficient proof",
      "Simplification",
      "Distraction",
      "ROOT"};
  return names[label_index(l)];
}

/// Rank of a label when ordering by code string ("AA" < "AE" < "AH" < ...).
/// Enum order follows display names, which is not the same ordering.
inline int code_rank(Label l) {
  static const std::array<int, kLabelCount> ranks = [] {
    std::array<int, kLabelCount> r{};
    std::vector<std::size_t> idx(kLabelCount);
    for (std::size_t i = 0; i < kLabelCount; ++i) idx[i] = i;
    for (std::size_t i = 0; i < kLabelCount; ++i)
      for (std::size_t j = i + 1; j < kLabelCount; ++j)
        if (code(static_cast<Label>(idx[j])) < code(static_cast<Label>(idx[i])))
          std::swap(idx[i], idx[j]);
    for (std::size_t rank = 0; rank < kLabelCount; ++rank) r[idx[rank]] = static_cast<int>(rank);
    return r;
  }();
  return ranks[label_index(l)];
}

namespace detail {
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace detail

/// Case-insensitive parse of a two/three-letter code or a display name.
/// Returns nullopt for anything outside the closed set.
inline std::optional<Label> parse_label(std::string_view text) {
  const std::string key = detail::ascii_lower(text);
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    auto l = static_cast<Label>(i);
    if (key == detail::ascii_lower(code(l))) return l;
    if (key == detail::ascii_lower(display_name(l))) return l;
  }
  // accent-free spelling of the one accented display name
  if (key == "thought-terminating cliche") return Label::TC;
  return std::nullopt;
}

// Small label sets as bitmasks over the 24 label indices.
using LabelMask = std::uint32_t;

constexpr LabelMask label_bit(Label l) { return LabelMask{1} << label_index(l); }
constexpr bool mask_contains(LabelMask m, Label l) { return (m & label_bit(l)) != 0; }

inline int mask_size(LabelMask m) { return __builtin_popcount(m); }

/// Members of a mask ordered by code string, for deterministic output.
inline std::vector<Label> mask_labels(LabelMask m) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < kLabelCount; ++i)
    if (mask_contains(m, static_cast<Label>(i))) out.push_back(static_cast<Label>(i));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (code_rank(out[j]) < code_rank(out[i])) std::swap(out[i], out[j]);
  return out;
}

}  // namespace fallax
