#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/records.hpp"
#include "fallax/taxonomy.hpp"

namespace fallax {

/// The four evaluation setups: post-level vs span-level crossed with
/// coarse (macro-category) vs fine labels.
enum class Task : std::uint8_t { PostC, PostF, SpanC, SpanF };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::PostC: return "post-c";
    case Task::PostF: return "post-f";
    case Task::SpanC: return "span-c";
    case Task::SpanF: return "span-f";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "post-c") return Task::PostC;
  if (s == "post-f") return Task::PostF;
  if (s == "span-c") return Task::SpanC;
  if (s == "span-f") return Task::SpanF;
  return std::nullopt;
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "strict") return Mode::Strict;
  if (s == "soft") return Mode::Soft;
  return std::nullopt;
}

struct MetricTriple {
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  friend bool operator==(const MetricTriple&, const MetricTriple&) = default;
};

inline MetricTriple make_triple(double p, double r) {
  const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  return MetricTriple{p, r, f1};
}

struct ScoringConfig {
  Task task = Task::SpanF;
  Mode mode = Mode::Strict;
  double delta_partial = 0.5;  // credit for a taxonomy-parent label match
  bool cap_per_span = false;   // clamp each span's summed credit to 1
  bool symmetric_soft = false; // also credit gold-parent-of-pred

  /// Throws std::invalid_argument on inconsistent settings. Soft mode is
  /// defined for the fine-grained span task only.
  void check() const {
    if (mode == Mode::Soft && task != Task::SpanF)
      throw std::invalid_argument(
          std::string("soft mode is only valid for span-f, not ") +
          task_name(task));
    if (!(delta_partial >= 0.0 && delta_partial <= 1.0))
      throw std::invalid_argument("delta must lie in [0,1]");
  }
};

/// Raised by evaluate() on gold/prediction mismatches.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// A span pooled over a whole test set; `post` namespaces token identities
/// so spans from different posts never intersect.
struct PooledSpan {
  int post = 0;
  FallacySpan span;
};

/// The token identities a span covers, namespaced by its post.
inline std::vector<std::pair<std::string, int>> span_tokens(
    const std::string& post_id, const FallacySpan& s) {
  std::vector<std::pair<std::string, int>> out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int i = s.start; i < s.end; ++i) out.emplace_back(post_id, i);
  return out;
}

inline int token_overlap(const FallacySpan& a, const FallacySpan& b) {
  return std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

/// C(s, t, h) with label credit d: the fraction of h covered by the token
/// intersection, scaled by d.
inline double pair_credit(const PooledSpan& s, const PooledSpan& t, int h,
                          double d) {
  if (h <= 0) throw std::invalid_argument("pair_credit: h must be positive");
  if (s.post != t.post) return 0.0;
  return d * token_overlap(s.span, t.span) / h;
}

/// Token-based partial-match precision/recall/F1 over pooled span sets.
///   P = (1/|T|) Σ_t Σ_s C(s, t, |t|)     R = (1/|S|) Σ_s Σ_t C(s, t, |s|)
/// with per-pair label credit from the taxonomy-aware credit function.
/// With cap_per_span, each outer-sum term is clamped to 1. Conventions:
/// both sets empty → 1/1/1; exactly one empty → 0/0/0.
inline MetricTriple score_spans(const std::vector<PooledSpan>& gold,
                                const std::vector<PooledSpan>& pred,
                                const Taxonomy& tax, const ScoringConfig& cfg) {
  cfg.check();
  if (gold.empty() && pred.empty()) return MetricTriple{1, 1, 1};
  if (gold.empty() || pred.empty()) return MetricTriple{0, 0, 0};

  std::unordered_map<int, std::vector<const PooledSpan*>> gold_by_post,
      pred_by_post;
  for (const PooledSpan& s : gold) gold_by_post[s.post].push_back(&s);
  for (const PooledSpan& t : pred) pred_by_post[t.post].push_back(&t);

  double p_sum = 0;
  for (const PooledSpan& t : pred) {
    double term = 0;
    if (auto it = gold_by_post.find(t.post); it != gold_by_post.end())
      for (const PooledSpan* s : it->second)
        term += label_credit(cfg.mode, tax, s->span.label, t.span.label,
                             cfg.delta_partial, cfg.symmetric_soft) *
                token_overlap(s->span, t.span) / t.span.length();
    if (cfg.cap_per_span) term = std::min(term, 1.0);
    p_sum += term;
  }

  double r_sum = 0;
  for (const PooledSpan& s : gold) {
    double term = 0;
    if (auto it = pred_by_post.find(s.post); it != pred_by_post.end())
      for (const PooledSpan* t : it->second)
        term += label_credit(cfg.mode, tax, s.span.label, t->span.label,
                             cfg.delta_partial, cfg.symmetric_soft) *
                token_overlap(s.span, t->span) / s.span.length();
    if (cfg.cap_per_span) term = std::min(term, 1.0);
    r_sum += term;
  }

  return make_triple(p_sum / static_cast<double>(pred.size()),
                     r_sum / static_cast<double>(gold.size()));
}

/// Map spans to macro-category labels: each fine-labeled span is replicated
/// once per macro ancestor (spans already carrying macro labels pass
/// through), then duplicates are removed and same-label overlapping or
/// touching spans are merged by interval union, restoring the view
/// invariant.
inline std::vector<FallacySpan> to_coarse(const std::vector<FallacySpan>& spans,
                                          const Taxonomy& tax) {
  std::vector<FallacySpan> out;
  for (const FallacySpan& s : spans) {
    if (is_fine(s.label)) {
      for (Label m : mask_labels(tax.macro_parents(s.label)))
        out.push_back(FallacySpan{s.start, s.end, m});
    } else if (is_macro(s.label)) {
      out.push_back(s);
    } else {
      throw TaxonomyError("to_coarse: span labeled ROOT is not mappable");
    }
  }
  merge_same_label(out);
  return out;
}

enum class Granularity : std::uint8_t { Fine, Coarse };

/// Coarsen a post-level label set: fine labels become the union of their
/// macro ancestors; macro labels pass through.
inline LabelMask coarsen_mask(LabelMask m, const Taxonomy& tax) {
  LabelMask out = 0;
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    const auto l = static_cast<Label>(i);
    if (!mask_contains(m, l)) continue;
    if (is_fine(l))
      out |= tax.macro_parents(l);
    else if (is_macro(l))
      out |= label_bit(l);
    else
      throw TaxonomyError("coarsen: ROOT is not a post label");
  }
  return out;
}

/// The set of unique span labels in a view, optionally coarsened.
inline LabelMask post_labels(const std::vector<FallacySpan>& spans,
                             Granularity g, const Taxonomy& tax) {
  LabelMask m = 0;
  for (const FallacySpan& s : spans) m |= label_bit(s.label);
  return g == Granularity::Coarse ? coarsen_mask(m, tax) : m;
}

/// Micro-averaged post-level metrics over aligned gold/pred label sets:
/// TP/FP/FN are pooled set intersections and differences across posts.
/// All-empty sides follow the same conventions as span scoring.
inline MetricTriple score_posts(const std::vector<LabelMask>& gold,
                                const std::vector<LabelMask>& pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("score_posts: gold/pred size mismatch");
  long long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    tp += mask_size(gold[i] & pred[i]);
    fp += mask_size(pred[i] & ~gold[i]);
    fn += mask_size(gold[i] & ~pred[i]);
  }
  const double p = (tp + fp) > 0 ? double(tp) / double(tp + fp)
                                 : (fn > 0 ? 0.0 : 1.0);
  const double r = (tp + fn) > 0 ? double(tp) / double(tp + fn)
                                 : (fp > 0 ? 0.0 : 1.0);
  return make_triple(p, r);
}

/// One fold's held-out post ids, by fold name.
struct FoldSpec {
  std::string name;
  std::vector<std::string> test_ids;
};

struct EvalReport {
  Task task = Task::SpanF;
  Mode mode = Mode::Strict;
  double delta_partial = 0.5;
  bool cap_per_span = false;
  bool symmetric_soft = false;

  std::vector<std::pair<std::string, MetricTriple>> per_view;
  MetricTriple aggregate;  // arithmetic mean of per-view P, R, F1

  struct FoldReport {
    std::string name;
    std::vector<std::pair<std::string, MetricTriple>> per_view;
    MetricTriple aggregate;
  };
  bool has_folds = false;
  std::vector<FoldReport> per_fold;
  MetricTriple fold_mean;
  MetricTriple fold_std;  // population std across folds

  std::vector<std::string> warnings;
};

namespace detail {

inline MetricTriple mean_of(const std::vector<MetricTriple>& xs) {
  MetricTriple m;
  if (xs.empty()) return m;
  for (const MetricTriple& x : xs) {
    m.precision += x.precision;
    m.recall += x.recall;
    m.f1 += x.f1;
  }
  const double n = static_cast<double>(xs.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

inline MetricTriple std_of(const std::vector<MetricTriple>& xs,
                           const MetricTriple& mean) {
  MetricTriple s;
  if (xs.empty()) return s;
  for (const MetricTriple& x : xs) {
    s.precision += (x.precision - mean.precision) * (x.precision - mean.precision);
    s.recall += (x.recall - mean.recall) * (x.recall - mean.recall);
    s.f1 += (x.f1 - mean.f1) * (x.f1 - mean.f1);
  }
  const double n = static_cast<double>(xs.size());
  s.precision = std::sqrt(s.precision / n);
  s.recall = std::sqrt(s.recall / n);
  s.f1 = std::sqrt(s.f1 / n);
  return s;
}

/// Per-post prediction span set for one gold view (paired or broadcast).
inline const std::vector<FallacySpan>* pred_spans_for_view(
    const PredictionPost& pp, const std::string& view_id) {
  if (pp.form == PredictionPost::Form::Spans) return &pp.spans;
  if (pp.form == PredictionPost::Form::Views) {
    for (const View& v : pp.views)
      if (v.annotator_id == view_id) return &v.spans;
  }
  return nullptr;
}

}  // namespace detail

/// Arithmetic mean of metric triples: precision, recall, and F1 are each
/// averaged independently — F1 is never recomputed from the averaged P and
/// R. This is the multi-view (and multi-fold) aggregation rule.
inline MetricTriple aggregate_triples(const std::vector<MetricTriple>& xs) {
  return detail::mean_of(xs);
}

/// Score predictions against every gold view and macro-average.
///
/// Gold/prediction pairing: paired predictions (per-view span sets) are
/// matched to gold views by annotator id; broadcast predictions (a single
/// span or label set) are scored against every gold view. Prediction post
/// ids must cover the gold post ids exactly. With fold specs, each fold's
/// held-out posts are scored separately and mean/std across folds added.
inline EvalReport evaluate(const Corpus& gold, const PredictionSet& preds,
                           const Taxonomy& tax, const ScoringConfig& cfg,
                           const std::vector<FoldSpec>& folds = {}) {
  cfg.check();
  const bool span_task = cfg.task == Task::SpanC || cfg.task == Task::SpanF;
  const Granularity gran = (cfg.task == Task::PostC || cfg.task == Task::SpanC)
                               ? Granularity::Coarse
                               : Granularity::Fine;

  // exact post-id cover
  std::map<std::string, const PredictionPost*> by_id;
  for (const PredictionPost& pp : preds.posts) by_id[pp.id] = &pp;
  for (const Post& p : gold.posts)
    if (!by_id.count(p.id))
      throw EvalError("no prediction for post \"" + p.id + "\"");
  if (by_id.size() != gold.posts.size()) {
    for (const auto& [id, pp] : by_id)
      if (!gold.find_post(id))
        throw EvalError("prediction for unknown post \"" + id + "\"");
  }

  // structural checks against gold
  int pred_conflicts = 0;
  for (const Post& p : gold.posts) {
    const PredictionPost& pp = *by_id.at(p.id);
    if (span_task && pp.form == PredictionPost::Form::Labels)
      throw EvalError("post \"" + p.id + "\": label-set predictions cannot be "
                      "scored on a span task");
    if (pp.form == PredictionPost::Form::Views)
      for (const std::string& vid : gold.view_ids)
        if (!detail::pred_spans_for_view(pp, vid))
          throw EvalError("post \"" + p.id + "\": paired prediction lacks view \"" +
                          vid + "\"");
    auto check_spans = [&](const std::vector<FallacySpan>& spans,
                           const std::string& where) {
      for (const FallacySpan& s : spans)
        if (s.end > p.token_count())
          throw EvalError("post \"" + p.id + "\" " + where + ": span " +
                          span_repr(s) + " out of range for " +
                          std::to_string(p.token_count()) + "-token post");
      for (std::size_t i = 0; i < spans.size(); ++i)
        for (std::size_t j = i + 1; j < spans.size(); ++j)
          if (same_label_conflict(spans[i], spans[j])) ++pred_conflicts;
    };
    if (pp.form == PredictionPost::Form::Spans) check_spans(pp.spans, "spans");
    if (pp.form == PredictionPost::Form::Views)
      for (const View& v : pp.views)
        check_spans(v.spans, "view \"" + v.annotator_id + "\"");
  }

  EvalReport report;
  report.task = cfg.task;
  report.mode = cfg.mode;
  report.delta_partial = cfg.delta_partial;
  report.cap_per_span = cfg.cap_per_span;
  report.symmetric_soft = cfg.symmetric_soft;
  if (span_task && !cfg.cap_per_span && pred_conflicts > 0)
    report.warnings.push_back(
        "predictions contain " + std::to_string(pred_conflicts) +
        " same-label overlapping or touching span pair(s); uncapped "
        "per-span credit may exceed 1 (use cap-per-span to clamp)");

  // score one subset of gold posts (by index) against predictions
  auto score_subset = [&](const std::vector<int>& post_idx)
      -> std::vector<std::pair<std::string, MetricTriple>> {
    std::vector<std::pair<std::string, MetricTriple>> per_view;
    for (const std::string& vid : gold.view_ids) {
      MetricTriple triple;
      if (span_task) {
        std::vector<PooledSpan> S, T;
        for (int pi : post_idx) {
          const Post& p = gold.posts[static_cast<std::size_t>(pi)];
          const View* gv = p.find_view(vid);
          std::vector<FallacySpan> gs = gv ? gv->spans : std::vector<FallacySpan>{};
          if (gran == Granularity::Coarse) gs = to_coarse(gs, tax);
          for (const FallacySpan& s : gs) S.push_back(PooledSpan{pi, s});
          const PredictionPost& pp = *by_id.at(p.id);
          const std::vector<FallacySpan>* ts =
              detail::pred_spans_for_view(pp, vid);
          std::vector<FallacySpan> tspans =
              ts ? *ts : std::vector<FallacySpan>{};
          if (gran == Granularity::Coarse) tspans = to_coarse(tspans, tax);
          for (const FallacySpan& t : tspans) T.push_back(PooledSpan{pi, t});
        }
        triple = score_spans(S, T, tax, cfg);
      } else {
        std::vector<LabelMask> G, P;
        for (int pi : post_idx) {
          const Post& p = gold.posts[static_cast<std::size_t>(pi)];
          const View* gv = p.find_view(vid);
          G.push_back(post_labels(gv ? gv->spans : std::vector<FallacySpan>{},
                                  gran, tax));
          const PredictionPost& pp = *by_id.at(p.id);
          LabelMask mask = 0;
          if (pp.form == PredictionPost::Form::Labels) {
            mask = pp.labels;
            if (gran == Granularity::Fine) {
              for (Label l : mask_labels(mask))
                if (!is_fine(l))
                  throw EvalError("post \"" + p.id + "\": label " +
                                  std::string(code(l)) +
                                  " is not a fine label (task " +
                                  task_name(cfg.task) + ")");
            } else {
              mask = coarsen_mask(mask, tax);
            }
          } else {
            const std::vector<FallacySpan>* ts =
                detail::pred_spans_for_view(pp, vid);
            mask = post_labels(ts ? *ts : std::vector<FallacySpan>{}, gran, tax);
          }
          P.push_back(mask);
        }
        triple = score_posts(G, P);
      }
      per_view.emplace_back(vid, triple);
    }
    return per_view;
  };

  auto aggregate_of = [](const std::vector<std::pair<std::string, MetricTriple>>&
                             per_view) {
    std::vector<MetricTriple> xs;
    for (const auto& [vid, t] : per_view) xs.push_back(t);
    return aggregate_triples(xs);
  };

  std::vector<int> all_idx(gold.posts.size());
  for (std::size_t i = 0; i < gold.posts.size(); ++i)
    all_idx[i] = static_cast<int>(i);
  report.per_view = score_subset(all_idx);
  report.aggregate = aggregate_of(report.per_view);

  if (!folds.empty()) {
    report.has_folds = true;
    std::vector<MetricTriple> fold_aggs;
    for (const FoldSpec& fold : folds) {
      std::vector<int> idx;
      std::set<std::string> wanted(fold.test_ids.begin(), fold.test_ids.end());
      for (const std::string& id : fold.test_ids)
        if (!gold.find_post(id))
          throw EvalError("fold \"" + fold.name + "\" references unknown post \"" +
                          id + "\"");
      for (std::size_t i = 0; i < gold.posts.size(); ++i)
        if (wanted.count(gold.posts[i].id)) idx.push_back(static_cast<int>(i));
      EvalReport::FoldReport fr;
      fr.name = fold.name;
      fr.per_view = score_subset(idx);
      fr.aggregate = aggregate_of(fr.per_view);
      fold_aggs.push_back(fr.aggregate);
      report.per_fold.push_back(std::move(fr));
    }
    report.fold_mean = detail::mean_of(fold_aggs);
    report.fold_std = detail::std_of(fold_aggs, report.fold_mean);
  }
  return report;
}

}  // namespace fallax
