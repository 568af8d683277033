#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fallax/label.hpp"

namespace fallax {

struct TaxonomyError : std::runtime_error {
  explicit TaxonomyError(const std::string& what) : std::runtime_error(what) {}
};

/// Label hierarchy: a DAG of (child, parent) edges over the label inventory,
/// rooted at ROOT. Drives coarse mapping (fine -> macro) and partial credit
/// for near-miss labels. Immutable once built; validation runs on every
/// construction path.
class Taxonomy {
 public:
  using Edge = std::pair<Label, Label>;  // (child, parent)

  static Taxonomy from_edges(const std::vector<Edge>& edges) {
    Taxonomy t;
    for (const Edge& e : edges) t.add_edge(e.first, e.second);
    t.finalize();
    return t;
  }

  /// Built-in hierarchy: three macro categories under ROOT, each fine label
  /// attached to its macro category (VA, CP and TC each belong to two), and
  /// AE additionally nested under RH.
  static Taxonomy defaults() { return from_edges(default_edges()); }

  static const std::vector<Edge>& default_edges() {
    static const std::vector<Edge> edges = {
        {Label::INS, Label::ROOT}, {Label::SIM, Label::ROOT},
        {Label::DIS, Label::ROOT},
        // members of "Insufficient proof"
        {Label::EP, Label::INS},   {Label::VA, Label::INS},
        // members of "Simplification"
        {Label::HG, Label::SIM},   {Label::VA, Label::SIM},
        {Label::FD, Label::SIM},   {Label::SS, Label::SIM},
        {Label::CO, Label::SIM},   {Label::CR, Label::SIM},
        {Label::TC, Label::SIM},   {Label::CP, Label::SIM},
        // members of "Distraction"
        {Label::RH, Label::DIS},   {Label::CP, Label::DIS},
        {Label::AE, Label::DIS},   {Label::TC, Label::DIS},
        {Label::SL, Label::DIS},   {Label::FW, Label::DIS},
        {Label::LL, Label::DIS},   {Label::AA, Label::DIS},
        {Label::FA, Label::DIS},   {Label::ST, Label::DIS},
        {Label::AH, Label::DIS},   {Label::NC, Label::DIS},
        {Label::DO, Label::DIS},
        // fine-to-fine nesting
        {Label::AE, Label::RH},
    };
    return edges;
  }

  /// Parse `CHILD<TAB>PARENT` lines; `#` starts a comment, blank lines are
  /// skipped. Labels accepted as codes or display names, case-insensitive.
  static Taxonomy load(std::istream& in) {
    Taxonomy t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const auto tab = trimmed.find('\t');
      if (tab == std::string::npos)
        throw TaxonomyError("taxonomy line " + std::to_string(lineno) +
                            ": expected CHILD<TAB>PARENT, got \"" + trimmed + "\"");
      const std::string child_text = trim(trimmed.substr(0, tab));
      const std::string parent_text = trim(trimmed.substr(tab + 1));
      const auto child = parse_label(child_text);
      if (!child)
        throw TaxonomyError("taxonomy line " + std::to_string(lineno) +
                            ": unknown label \"" + child_text + "\"");
      const auto parent = parse_label(parent_text);
      if (!parent)
        throw TaxonomyError("taxonomy line " + std::to_string(lineno) +
                            ": unknown label \"" + parent_text + "\"");
      t.add_edge(*child, *parent);
    }
    t.finalize();
    return t;
  }

  const std::vector<Edge>& edges() const { return edges_; }

  /// Immediate parents of a label.
  LabelMask parents(Label l) const { return parents_[label_index(l)]; }

  /// All transitive ancestors (excluding the label itself).
  LabelMask ancestors(Label l) const { return ancestors_[label_index(l)]; }

  /// True iff `parent` is an immediate parent of `child`.
  bool is_immediate_parent(Label parent, Label child) const {
    return mask_contains(parents_[label_index(child)], parent);
  }

  /// Macro-category ancestors of a fine label; always non-empty.
  LabelMask macro_parents(Label l) const {
    if (!is_fine(l))
      throw TaxonomyError(std::string("macro_parents requires a fine label, got ") +
                          std::string(code(l)));
    return ancestors_[label_index(l)] & macro_mask();
  }

  static constexpr LabelMask macro_mask() {
    return label_bit(Label::INS) | label_bit(Label::SIM) | label_bit(Label::DIS);
  }

 private:
  std::vector<Edge> edges_;
  std::array<LabelMask, kLabelCount> parents_{};
  std::array<LabelMask, kLabelCount> ancestors_{};

  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
  }

  void add_edge(Label child, Label parent) {
    if (child == Label::ROOT)
      throw TaxonomyError("ROOT cannot have a parent");
    if (mask_contains(parents_[label_index(child)], parent)) return;  // dedupe
    parents_[label_index(child)] |= label_bit(parent);
    edges_.emplace_back(child, parent);
  }

  void finalize() {
    check_acyclic();
    compute_closure();
    // every node in the graph must reach ROOT
    LabelMask in_graph = label_bit(Label::ROOT);
    for (const Edge& e : edges_) in_graph |= label_bit(e.first) | label_bit(e.second);
    for (std::size_t i = 0; i < kLabelCount; ++i) {
      const auto l = static_cast<Label>(i);
      if (!mask_contains(in_graph, l) || l == Label::ROOT) continue;
      if (!mask_contains(ancestors_[i], Label::ROOT))
        throw TaxonomyError(std::string("label ") + std::string(code(l)) +
                            " does not reach ROOT");
    }
    // every fine label needs at least one macro-category ancestor
    for (Label l : kFineLabels) {
      if ((ancestors_[label_index(l)] & macro_mask()) == 0)
        throw TaxonomyError(std::string("fine label ") + std::string(code(l)) +
                            " has no macro-category ancestor");
    }
  }

  // Kahn's algorithm over child->parent edges; leftovers mean a cycle.
  void check_acyclic() const {
    std::array<int, kLabelCount> out_degree{};
    for (std::size_t i = 0; i < kLabelCount; ++i)
      out_degree[i] = mask_size(parents_[i]);
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < kLabelCount; ++i)
      if (out_degree[i] == 0) queue.push_back(i);
    std::size_t processed = 0;
    while (!queue.empty()) {
      const std::size_t node = queue.back();
      queue.pop_back();
      ++processed;
      for (std::size_t child = 0; child < kLabelCount; ++child) {
        if (mask_contains(parents_[child], static_cast<Label>(node))) {
          if (--out_degree[child] == 0) queue.push_back(child);
        }
      }
    }
    if (processed != kLabelCount) {
      std::ostringstream msg;
      msg << "taxonomy contains a cycle involving:";
      std::array<bool, kLabelCount> seen{};
      for (std::size_t i = 0; i < kLabelCount; ++i) seen[i] = false;
      // nodes still holding out-degree are on or above a cycle
      for (std::size_t i = 0; i < kLabelCount; ++i)
        if (out_degree[i] > 0 && !seen[i])
          msg << ' ' << code(static_cast<Label>(i));
      throw TaxonomyError(msg.str());
    }
  }

  void compute_closure() {
    for (std::size_t i = 0; i < kLabelCount; ++i) ancestors_[i] = parents_[i];
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < kLabelCount; ++i) {
        LabelMask next = ancestors_[i];
        for (std::size_t p = 0; p < kLabelCount; ++p)
          if (mask_contains(ancestors_[i], static_cast<Label>(p)))
            next |= ancestors_[p];
        if (next != ancestors_[i]) {
          ancestors_[i] = next;
          changed = true;
        }
      }
    }
  }
};

/// Label-credit mode: exact match only, or partial credit for taxonomy
/// near-misses.
enum class Mode : std::uint8_t { Strict, Soft };

inline const char* mode_name(Mode m) { return m == Mode::Strict ? "strict" : "soft"; }

/// Credit for predicting `pred` against gold label `gold`. Exact match is
/// always 1. In soft mode a prediction that names an immediate parent of the
/// gold label earns `partial` credit; the reverse direction only counts when
/// `symmetric` is set.
inline double label_credit(Mode mode, const Taxonomy& tax, Label gold, Label pred,
                           double partial = 0.5, bool symmetric = false) {
  if (gold == pred) return 1.0;
  if (mode == Mode::Soft) {
    if (tax.is_immediate_parent(pred, gold)) return partial;
    if (symmetric && tax.is_immediate_parent(gold, pred)) return partial;
  }
  return 0.0;
}

inline double delta(Mode mode, const Taxonomy& tax, Label gold, Label pred) {
  return label_credit(mode, tax, gold, pred);
}

}  // namespace fallax
