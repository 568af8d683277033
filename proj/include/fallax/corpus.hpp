#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fallax/label.hpp"

namespace fallax {

/// Half-open token interval [start, end) carrying one fallacy label.
struct FallacySpan {
  int start = 0;
  int end = 0;
  Label label = Label::LL;

  int length() const { return end - start; }

  friend bool operator==(const FallacySpan&, const FallacySpan&) = default;
};

/// Canonical ordering: (start, end, label code string).
inline bool span_less(const FallacySpan& a, const FallacySpan& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return code_rank(a.label) < code_rank(b.label);
}

inline std::string span_repr(const FallacySpan& s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + "," +
         std::string(code(s.label)) + ")";
}

inline bool spans_share_tokens(const FallacySpan& a, const FallacySpan& b) {
  return a.start < b.end && b.start < a.end;
}

/// Same-label spans may neither overlap nor touch end-to-start; both break
/// the one-span-per-stretch rule for a single fallacy type.
inline bool same_label_conflict(const FallacySpan& a, const FallacySpan& b) {
  return a.label == b.label && a.start <= b.end && b.start <= a.end;
}

/// One annotator's span set for a post. Spans with different labels may
/// overlap freely; same-label spans may not overlap or touch.
struct View {
  std::string annotator_id;
  std::vector<FallacySpan> spans;

  friend bool operator==(const View&, const View&) = default;
};

/// One social-media post with its token sequence and one view per annotator.
struct Post {
  std::string id;
  std::string topic;
  std::string date;  // "YYYY-MM"
  std::vector<std::string> tokens;
  std::vector<View> views;  // ordered as in Corpus::view_ids

  int token_count() const { return static_cast<int>(tokens.size()); }

  const View* find_view(const std::string& annotator_id) const {
    for (const View& v : views)
      if (v.annotator_id == annotator_id) return &v;
    return nullptr;
  }

  View* find_view(const std::string& annotator_id) {
    for (View& v : views)
      if (v.annotator_id == annotator_id) return &v;
    return nullptr;
  }

  friend bool operator==(const Post&, const Post&) = default;
};

/// Ordered post collection; every post carries exactly the declared views.
struct Corpus {
  std::vector<Post> posts;
  std::vector<std::string> view_ids;

  std::size_t post_count() const { return posts.size(); }

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const Post& p : posts) n += p.tokens.size();
    return n;
  }

  const Post* find_post(const std::string& id) const {
    for (const Post& p : posts)
      if (p.id == id) return &p;
    return nullptr;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Sort spans into canonical (start, end, label code) order, dropping exact
/// duplicates.
inline void normalize_spans(std::vector<FallacySpan>& spans) {
  std::sort(spans.begin(), spans.end(), span_less);
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
}

/// Corpus with every view's span list in canonical order.
inline Corpus normalized(Corpus c) {
  for (Post& p : c.posts)
    for (View& v : p.views) normalize_spans(v.spans);
  return c;
}

/// Merge overlapping or touching same-label spans by interval union,
/// leaving different-label spans untouched. Restores the no-same-label-
/// overlap invariant after mechanical span edits.
inline void merge_same_label(std::vector<FallacySpan>& spans) {
  normalize_spans(spans);
  std::vector<FallacySpan> out;
  for (const FallacySpan& s : spans) {
    bool merged = false;
    for (FallacySpan& o : out) {
      if (o.label == s.label && s.start <= o.end && o.start <= s.end) {
        o.start = std::min(o.start, s.start);
        o.end = std::max(o.end, s.end);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(s);
  }
  // a merge can widen an interval into a later same-label one; iterate
  bool changed = out.size() != spans.size();
  spans = std::move(out);
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < spans.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < spans.size() && !changed; ++j)
        if (spans[i].label == spans[j].label && spans[j].start <= spans[i].end &&
            spans[i].start <= spans[j].end) {
          spans[i].start = std::min(spans[i].start, spans[j].start);
          spans[i].end = std::max(spans[i].end, spans[j].end);
          spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
  }
  normalize_spans(spans);
}

}  // namespace fallax
