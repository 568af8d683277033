#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/rng.hpp"
#include "fallax/violation.hpp"

namespace fallax {

/// Synthetic two-view corpus generator: view A1 is drawn fresh, view A2 is
/// A1 passed through the configured perturbations. Deterministic under
/// `seed`; every post uses its own derived stream.
struct GenConfig {
  int posts = 50;
  int min_tokens = 5;
  int max_tokens = 40;
  int min_spans = 0;  // per view, before same-label merging
  int max_spans = 5;
  int min_span_len = 1;
  int max_span_len = 8;
  std::vector<Label> label_set;  // empty = all 20 fine labels

  double jitter_sigma = 0.0;  // boundary jitter, in tokens
  double confusion = 0.0;     // probability of redrawing a span's label
  double drop = 0.0;          // probability of dropping a span
  double insert = 0.0;        // per existing span, probability of adding one

  std::uint64_t seed = 0;

  std::vector<Label> labels() const {
    if (!label_set.empty()) return label_set;
    return std::vector<Label>(kFineLabels.begin(), kFineLabels.end());
  }

  void check() const {
    if (posts < 0) throw std::invalid_argument("posts must be non-negative");
    if (min_tokens < 1 || max_tokens < min_tokens)
      throw std::invalid_argument("token range must satisfy 1 <= min <= max");
    if (min_spans < 0 || max_spans < min_spans)
      throw std::invalid_argument("span-count range must satisfy 0 <= min <= max");
    if (min_span_len < 1 || max_span_len < min_span_len)
      throw std::invalid_argument("span-length range must satisfy 1 <= min <= max");
    if (min_span_len > max_tokens)
      throw std::invalid_argument(
          "infeasible: minimum span length exceeds maximum post length");
    for (double p : {confusion, drop, insert})
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("perturbation probabilities must lie in [0,1]");
    if (jitter_sigma < 0)
      throw std::invalid_argument("jitter sigma must be non-negative");
  }
};

namespace detail {

inline FallacySpan random_span(const GenConfig& cfg,
                               const std::vector<Label>& labels, int tokens,
                               Xoshiro256StarStar& rng) {
  int len = cfg.min_span_len +
            static_cast<int>(rng.bounded(
                static_cast<std::uint64_t>(cfg.max_span_len - cfg.min_span_len + 1)));
  if (len > tokens) len = tokens;
  const int start =
      static_cast<int>(rng.bounded(static_cast<std::uint64_t>(tokens - len + 1)));
  const Label label =
      labels[static_cast<std::size_t>(rng.bounded(labels.size()))];
  return FallacySpan{start, start + len, label};
}

inline int clamp_int(int x, int lo, int hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace detail

/// Apply the configured perturbations to one view over a `token_count`-token
/// post: per span — drop, boundary jitter (rounded Gaussian offsets, then
/// clamped back into range with length >= 1), label confusion (redraw
/// excluding the current label); per original span — possible insertion of
/// a fresh random span. Same-label collisions are merged, so the result is
/// always a valid view.
inline View perturb(const View& view, const GenConfig& cfg, int token_count,
                    Xoshiro256StarStar& rng) {
  cfg.check();
  const std::vector<Label> labels = cfg.labels();
  View out{view.annotator_id, {}};
  for (const FallacySpan& s : view.spans) {
    if (rng.uniform01() < cfg.drop) continue;
    FallacySpan t = s;
    if (cfg.jitter_sigma > 0) {
      t.start += static_cast<int>(std::llround(rng.normal(cfg.jitter_sigma)));
      t.end += static_cast<int>(std::llround(rng.normal(cfg.jitter_sigma)));
      t.start = detail::clamp_int(t.start, 0, token_count - 1);
      t.end = detail::clamp_int(t.end, t.start + 1, token_count);
    }
    if (rng.uniform01() < cfg.confusion && labels.size() > 1) {
      Label redrawn = t.label;
      while (redrawn == t.label)
        redrawn = labels[static_cast<std::size_t>(rng.bounded(labels.size()))];
      t.label = redrawn;
    }
    out.spans.push_back(t);
  }
  for (std::size_t i = 0; i < view.spans.size(); ++i)
    if (rng.uniform01() < cfg.insert)
      out.spans.push_back(detail::random_span(cfg, labels, token_count, rng));
  merge_same_label(out.spans);
  return out;
}

/// Generate a valid two-view corpus (views "A1" and "A2"). Post `i` draws
/// everything from the derived stream `i` of the master seed, so corpora
/// are reproducible post by post.
inline Corpus generate(const GenConfig& cfg) {
  cfg.check();
  const std::vector<Label> labels = cfg.labels();
  static const char* kTopics[3] = {"migration", "climate", "health"};

  Corpus corpus;
  corpus.view_ids = {"A1", "A2"};
  int id_width = 1;
  for (int n = cfg.posts; n >= 10; n /= 10) ++id_width;

  for (int i = 0; i < cfg.posts; ++i) {
    Xoshiro256StarStar rng =
        derived_rng(cfg.seed, static_cast<std::uint64_t>(i));
    Post post;
    std::string num = std::to_string(i);
    while (static_cast<int>(num.size()) < id_width) num.insert(num.begin(), '0');
    post.id = "p" + num;
    post.topic = kTopics[i % 3];
    const int month = i % 12 + 1;
    post.date = "2022-" + std::string(month < 10 ? "0" : "") + std::to_string(month);

    const int tokens =
        cfg.min_tokens + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
                             cfg.max_tokens - cfg.min_tokens + 1)));
    for (int t = 0; t < tokens; ++t)
      post.tokens.push_back("w" + std::to_string(rng.bounded(5000)));

    View a1{"A1", {}};
    const int spans =
        cfg.min_spans + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
                            cfg.max_spans - cfg.min_spans + 1)));
    for (int s = 0; s < spans; ++s)
      a1.spans.push_back(detail::random_span(cfg, labels, tokens, rng));
    merge_same_label(a1.spans);

    View a2 = perturb(a1, cfg, tokens, rng);
    a2.annotator_id = "A2";

    post.views.push_back(std::move(a1));
    post.views.push_back(std::move(a2));
    corpus.posts.push_back(std::move(post));
  }
  return corpus;
}

/// Read a generator configuration from JSON. Recognized keys: posts,
/// tokens [min,max], spans [min,max], span_length [min,max],
/// labels [codes], jitter_sigma, confusion, drop, insert, seed.
inline GenConfig parse_gen_config(std::istream& in) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("generator config: invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw FormatError("generator config must be a JSON object");

  GenConfig cfg;
  auto int_range = [&](const nlohmann::ordered_json& v, const char* key,
                       int& lo, int& hi) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer())
      throw FormatError(std::string("generator config: \"") + key +
                        "\" must be [min, max]");
    lo = v[0].get<int>();
    hi = v[1].get<int>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "posts") {
      if (!value.is_number_integer())
        throw FormatError("generator config: \"posts\" must be an integer");
      cfg.posts = value.get<int>();
    } else if (key == "tokens") {
      int_range(value, "tokens", cfg.min_tokens, cfg.max_tokens);
    } else if (key == "spans") {
      int_range(value, "spans", cfg.min_spans, cfg.max_spans);
    } else if (key == "span_length") {
      int_range(value, "span_length", cfg.min_span_len, cfg.max_span_len);
    } else if (key == "labels") {
      if (!value.is_array())
        throw FormatError("generator config: \"labels\" must be an array");
      for (const auto& lv : value) {
        if (!lv.is_string())
          throw FormatError("generator config: labels must be strings");
        const auto label = parse_label(lv.get<std::string>());
        if (!label)
          throw FormatError("generator config: unknown label \"" +
                            lv.get<std::string>() + "\"");
        cfg.label_set.push_back(*label);
      }
    } else if (key == "jitter_sigma" || key == "confusion" || key == "drop" ||
               key == "insert") {
      if (!value.is_number())
        throw FormatError(std::string("generator config: \"") + key +
                          "\" must be a number");
      const double d = value.get<double>();
      if (key == "jitter_sigma") cfg.jitter_sigma = d;
      if (key == "confusion") cfg.confusion = d;
      if (key == "drop") cfg.drop = d;
      if (key == "insert") cfg.insert = d;
    } else if (key == "seed") {
      if (!value.is_number_integer())
        throw FormatError("generator config: \"seed\" must be an integer");
      cfg.seed = value.get<std::uint64_t>();
    } else {
      throw FormatError("generator config: unknown key \"" + key + "\"");
    }
  }
  cfg.check();
  return cfg;
}

}  // namespace fallax
