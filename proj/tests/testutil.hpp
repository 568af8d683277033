#pragma once

// Shared fixture builders for the test suite.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fallax/fallax.hpp"

namespace testutil {

using namespace fallax;

inline FallacySpan sp(int start, int end, Label label) {
  return FallacySpan{start, end, label};
}

inline View view(std::string id, std::vector<FallacySpan> spans) {
  View v;
  v.annotator_id = std::move(id);
  v.spans = std::move(spans);
  return v;
}

inline Post make_post(std::string id, int tokens, std::vector<View> views,
                      std::string topic = "misc", std::string date = "2022-01") {
  Post p;
  p.id = std::move(id);
  p.topic = std::move(topic);
  p.date = std::move(date);
  p.tokens.reserve(static_cast<std::size_t>(tokens));
  for (int i = 0; i < tokens; ++i) p.tokens.push_back("w" + std::to_string(i));
  p.views = std::move(views);
  return p;
}

/// Corpus from posts; view ids are taken from the first post's views.
inline Corpus make_corpus(std::vector<Post> posts) {
  Corpus c;
  c.posts = std::move(posts);
  if (!c.posts.empty())
    for (const View& v : c.posts.front().views)
      c.view_ids.push_back(v.annotator_id);
  return c;
}

/// One-post, one-view corpus: the workhorse for worked examples.
inline Corpus one_view_corpus(int tokens, std::vector<FallacySpan> spans,
                              const std::string& view_id = "A1") {
  return make_corpus({make_post("p0", tokens, {view(view_id, std::move(spans))})});
}

/// Small random corpus driven by the synthetic generator.
inline Corpus small_random_corpus(std::uint64_t seed, int posts = 6,
                                  int max_tokens = 30, int max_spans = 6) {
  GenConfig cfg;
  cfg.posts = posts;
  cfg.min_tokens = 4;
  cfg.max_tokens = max_tokens;
  cfg.min_spans = 0;
  cfg.max_spans = max_spans;
  cfg.min_span_len = 1;
  cfg.max_span_len = 6;
  cfg.jitter_sigma = 1.2;
  cfg.confusion = 0.25;
  cfg.drop = 0.15;
  cfg.insert = 0.2;
  cfg.seed = seed;
  return generate(cfg);
}

/// Pooled span set of one view, post indices matching corpus order.
inline std::vector<PooledSpan> pooled(const Corpus& c,
                                      const std::string& view_id) {
  std::vector<PooledSpan> out;
  for (std::size_t i = 0; i < c.posts.size(); ++i)
    if (const View* v = c.posts[i].find_view(view_id))
      for (const FallacySpan& s : v->spans)
        out.push_back(PooledSpan{static_cast<int>(i), s});
  return out;
}

/// Broadcast predictions built per post by a span-producing function.
inline PredictionSet preds_spans(
    const Corpus& c,
    const std::function<std::vector<FallacySpan>(const Post&)>& f) {
  PredictionSet ps;
  ps.view_ids = c.view_ids;
  for (const Post& p : c.posts) {
    PredictionPost pp;
    pp.id = p.id;
    pp.form = PredictionPost::Form::Spans;
    pp.spans = f(p);
    ps.posts.push_back(std::move(pp));
  }
  return ps;
}

/// Broadcast predictions reading one gold view's spans.
inline PredictionSet preds_from_view(const Corpus& c,
                                     const std::string& view_id) {
  return preds_spans(c, [&](const Post& p) {
    const View* v = p.find_view(view_id);
    return v ? v->spans : std::vector<FallacySpan>{};
  });
}

/// Paired predictions copying every gold view verbatim (a perfect scorer).
inline PredictionSet preds_paired_copy(const Corpus& c) {
  PredictionSet ps;
  ps.view_ids = c.view_ids;
  for (const Post& p : c.posts) {
    PredictionPost pp;
    pp.id = p.id;
    pp.form = PredictionPost::Form::Views;
    pp.views = p.views;
    ps.posts.push_back(std::move(pp));
  }
  return ps;
}

/// Label-set predictions, one mask per post in corpus order.
inline PredictionSet preds_labels(const Corpus& c,
                                  const std::vector<LabelMask>& masks) {
  PredictionSet ps;
  ps.view_ids = c.view_ids;
  for (std::size_t i = 0; i < c.posts.size(); ++i) {
    PredictionPost pp;
    pp.id = c.posts[i].id;
    pp.form = PredictionPost::Form::Labels;
    pp.labels = masks.at(i);
    ps.posts.push_back(std::move(pp));
  }
  return ps;
}

/// A random fine label.
inline Label random_fine_label(Xoshiro256StarStar& rng) {
  return kFineLabels[static_cast<std::size_t>(
      rng.bounded(kFineLabels.size()))];
}

/// Random span list over a post of `tokens` tokens; may contain same-label
/// conflicts unless `valid` is set, in which case conflicting draws are
/// discarded.
inline std::vector<FallacySpan> random_spans(Xoshiro256StarStar& rng,
                                             int tokens, int max_spans,
                                             bool valid) {
  std::vector<FallacySpan> out;
  const int n = static_cast<int>(rng.bounded(
      static_cast<std::uint64_t>(max_spans) + 1));
  for (int i = 0; i < n; ++i) {
    const int len = 1 + static_cast<int>(rng.bounded(
                            static_cast<std::uint64_t>(std::min(tokens, 6))));
    const int start = static_cast<int>(
        rng.bounded(static_cast<std::uint64_t>(tokens - len + 1)));
    FallacySpan s{start, start + len, random_fine_label(rng)};
    if (valid) {
      bool clash = false;
      for (const FallacySpan& q : out)
        if (same_label_conflict(q, s)) clash = true;
      if (clash) continue;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace testutil
