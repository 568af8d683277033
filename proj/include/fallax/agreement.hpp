#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fallax/assignment.hpp"
#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/rng.hpp"

namespace fallax {

/// One annotated span viewed as an alignable unit on a post's token line.
struct Unit {
  int start = 0;
  int end = 0;  // half-open
  Label category = Label::LL;
  std::string owner;  // annotator id

  int length() const { return end - start; }
};

struct AgreementConfig {
  double alpha = 1.0;        // positional weight
  double beta = 1.0;         // categorical weight
  double delta_empty = 1.0;  // unpaired-unit penalty scale
  int resamples = 30;        // chance-model rounds
  std::uint64_t seed = 42;

  void check() const {
    if (alpha < 0 || beta < 0)
      throw std::invalid_argument("alpha and beta must be non-negative");
    if (alpha == 0 && beta == 0)
      throw std::invalid_argument("alpha and beta cannot both be zero");
    if (delta_empty < 0)
      throw std::invalid_argument("delta-empty must be non-negative");
    if (resamples < 1)
      throw std::invalid_argument("resamples must be at least 1");
  }
};

/// Raised when the chance model degenerates (zero expected disorder with
/// non-zero observed disorder).
struct AgreementError : std::runtime_error {
  explicit AgreementError(const std::string& what) : std::runtime_error(what) {}
};

/// Squared relative boundary displacement of two units:
/// ((|Δstart| + |Δend|) / (len_u + len_v))², in token units.
inline double positional_dissimilarity(const Unit& u, const Unit& v) {
  const double num = std::abs(u.start - v.start) + std::abs(u.end - v.end);
  const double den = u.length() + v.length();
  const double ratio = num / den;
  return ratio * ratio;
}

inline double categorical_dissimilarity(const Unit& u, const Unit& v) {
  return u.category == v.category ? 0.0 : 1.0;
}

/// Best alignment of two views' units on one post: each unit pairs with at
/// most one unit of the other view or stays unpaired.
struct Alignment {
  std::vector<std::pair<int, int>> pairs;  // (index into a, index into b)
  std::vector<int> unpaired_a;
  std::vector<int> unpaired_b;
  double total_cost = 0;
  int unitary_alignments = 0;  // pairs + unpaired units
  double disorder = 0;         // total_cost / max(1, unitary_alignments)
};

/// Exact minimum-total-cost alignment. Pair cost is α·d_pos + β·d_cat;
/// an unpaired unit costs (α+β)·δ_empty. Reduction: pairing (i,j) instead
/// of leaving both unpaired changes the total by c_ij − 2e, so the optimum
/// is a minimum-cost matching over the clamped reduced costs min(c_ij−2e, 0)
/// on a max(n_a,n_b)-sized square matrix (dummy cells 0). Ties (reduced
/// cost exactly 0) resolve to unpaired.
inline Alignment best_alignment(const std::vector<Unit>& a,
                                const std::vector<Unit>& b,
                                const AgreementConfig& cfg) {
  cfg.check();
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const double e = (cfg.alpha + cfg.beta) * cfg.delta_empty;

  Alignment out;
  const int m = std::max(na, nb);
  if (m == 0) return out;

  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(na),
      std::vector<double>(static_cast<std::size_t>(nb), 0.0));
  std::vector<std::vector<double>> reduced(
      static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double c =
          cfg.alpha * positional_dissimilarity(a[static_cast<std::size_t>(i)],
                                               b[static_cast<std::size_t>(j)]) +
          cfg.beta * categorical_dissimilarity(a[static_cast<std::size_t>(i)],
                                               b[static_cast<std::size_t>(j)]);
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
      const double r = c - 2 * e;
      reduced[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          r < 0 ? r : 0.0;
    }

  const AssignmentResult assignment = solve_assignment(reduced);

  std::vector<char> b_paired(static_cast<std::size_t>(nb), 0);
  for (int i = 0; i < na; ++i) {
    const int j = assignment.row_to_col[static_cast<std::size_t>(i)];
    const bool real = j >= 0 && j < nb &&
                      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                              2 * e <
                          0;
    if (real) {
      out.pairs.emplace_back(i, j);
      b_paired[static_cast<std::size_t>(j)] = 1;
      out.total_cost += cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    } else {
      out.unpaired_a.push_back(i);
      out.total_cost += e;
    }
  }
  for (int j = 0; j < nb; ++j)
    if (!b_paired[static_cast<std::size_t>(j)]) {
      out.unpaired_b.push_back(j);
      out.total_cost += e;
    }

  out.unitary_alignments = static_cast<int>(out.pairs.size()) +
                           static_cast<int>(out.unpaired_a.size()) +
                           static_cast<int>(out.unpaired_b.size());
  out.disorder = out.total_cost / std::max(1, out.unitary_alignments);
  return out;
}

struct AgreementResult {
  double gamma = 0;
  double gamma_cat = 0;
  double observed_disorder = 0;
  double expected_disorder = 0;
  double observed_cat = 0;
  double expected_cat = 0;
  std::vector<double> per_round_expected;      // one per resample
  std::vector<double> per_round_expected_cat;  // one per resample
  AgreementConfig config;
  std::string view_a;
  std::string view_b;
  // The categorical measure is computed on the matched pairs of the
  // combined-cost best alignment.
  std::string method = "aligned-categorical";
};

namespace detail {

inline std::vector<Unit> units_of(const View& v) {
  std::vector<Unit> units;
  units.reserve(v.spans.size());
  for (const FallacySpan& s : v.spans)
    units.push_back(Unit{s.start, s.end, s.label, v.annotator_id});
  return units;
}

struct DisorderAccumulator {
  double weighted_disorder = 0;  // Σ disorder_p · units_p
  long long unit_weight = 0;     // Σ units_p
  double cat_sum = 0;            // Σ d_cat over matched pairs
  long long pair_count = 0;

  void add_post(const std::vector<Unit>& a, const std::vector<Unit>& b,
                const AgreementConfig& cfg) {
    if (a.empty() && b.empty()) return;
    const Alignment al = best_alignment(a, b, cfg);
    const long long units = static_cast<long long>(a.size() + b.size());
    weighted_disorder += al.disorder * static_cast<double>(units);
    unit_weight += units;
    for (const auto& [i, j] : al.pairs) {
      cat_sum += categorical_dissimilarity(a[static_cast<std::size_t>(i)],
                                           b[static_cast<std::size_t>(j)]);
      ++pair_count;
    }
  }

  double disorder() const {
    return unit_weight > 0 ? weighted_disorder / static_cast<double>(unit_weight)
                           : 0.0;
  }
  double cat_disorder() const {
    return pair_count > 0 ? cat_sum / static_cast<double>(pair_count) : 0.0;
  }
};

/// Corpus-wide empirical pools for one view's chance model.
struct ViewPools {
  std::vector<int> lengths;
  std::vector<Label> categories;
  std::vector<int> counts;  // units per post, in corpus post order
};

}  // namespace detail

/// Chance-corrected agreement between two annotator views.
///
/// Observed disorder: unit-count-weighted mean of per-post best-alignment
/// disorders. Expected disorder: mean over `resamples` rounds; each round
/// redraws every post's units keeping per-post unit counts, with lengths
/// and categories drawn from that view's corpus-wide empirical pools
/// (lengths clamped to the post) and starts uniform over feasible offsets.
/// gamma = 1 − observed/expected (1 when observed is 0). gamma_cat applies
/// the same construction to the mean categorical mismatch over matched
/// pairs of the best alignments.
inline AgreementResult compute_gamma(const Corpus& corpus,
                                     const std::string& view_a,
                                     const std::string& view_b,
                                     const AgreementConfig& cfg) {
  cfg.check();
  if (view_a == view_b)
    throw std::invalid_argument("agreement needs two distinct views");
  for (const std::string& vid : {view_a, view_b}) {
    bool found = false;
    for (const std::string& known : corpus.view_ids)
      if (known == vid) found = true;
    if (!found)
      throw std::invalid_argument("view \"" + vid + "\" not in corpus");
  }

  AgreementResult result;
  result.config = cfg;
  result.view_a = view_a;
  result.view_b = view_b;

  // observed
  detail::DisorderAccumulator observed;
  detail::ViewPools pool_a, pool_b;
  for (const Post& p : corpus.posts) {
    const View* va = p.find_view(view_a);
    const View* vb = p.find_view(view_b);
    const std::vector<Unit> ua = va ? detail::units_of(*va) : std::vector<Unit>{};
    const std::vector<Unit> ub = vb ? detail::units_of(*vb) : std::vector<Unit>{};
    observed.add_post(ua, ub, cfg);
    pool_a.counts.push_back(static_cast<int>(ua.size()));
    pool_b.counts.push_back(static_cast<int>(ub.size()));
    for (const Unit& u : ua) {
      pool_a.lengths.push_back(u.length());
      pool_a.categories.push_back(u.category);
    }
    for (const Unit& u : ub) {
      pool_b.lengths.push_back(u.length());
      pool_b.categories.push_back(u.category);
    }
  }
  result.observed_disorder = observed.disorder();
  result.observed_cat = observed.cat_disorder();

  // expected, via chance resampling
  auto resample_view = [](const detail::ViewPools& pool, int count, int tokens,
                          Xoshiro256StarStar& rng) {
    std::vector<Unit> units;
    units.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      int len = pool.lengths[static_cast<std::size_t>(
          rng.bounded(pool.lengths.size()))];
      if (len > tokens) len = tokens;  // clamp to the post
      const int start =
          static_cast<int>(rng.bounded(static_cast<std::uint64_t>(tokens - len + 1)));
      const Label cat = pool.categories[static_cast<std::size_t>(
          rng.bounded(pool.categories.size()))];
      units.push_back(Unit{start, start + len, cat, ""});
    }
    return units;
  };

  double expected_sum = 0;
  double expected_cat_sum = 0;
  for (int round = 0; round < cfg.resamples; ++round) {
    Xoshiro256StarStar rng =
        derived_rng(cfg.seed, static_cast<std::uint64_t>(round));
    detail::DisorderAccumulator acc;
    for (std::size_t pi = 0; pi < corpus.posts.size(); ++pi) {
      const int tokens = corpus.posts[pi].token_count();
      const std::vector<Unit> ra =
          resample_view(pool_a, pool_a.counts[pi], tokens, rng);
      const std::vector<Unit> rb =
          resample_view(pool_b, pool_b.counts[pi], tokens, rng);
      acc.add_post(ra, rb, cfg);
    }
    result.per_round_expected.push_back(acc.disorder());
    result.per_round_expected_cat.push_back(acc.cat_disorder());
    expected_sum += acc.disorder();
    expected_cat_sum += acc.cat_disorder();
  }
  result.expected_disorder = expected_sum / cfg.resamples;
  result.expected_cat = expected_cat_sum / cfg.resamples;

  auto chance_corrected = [](double obs, double exp, const char* what) {
    if (obs == 0) return 1.0;
    if (exp == 0)
      throw AgreementError(std::string("expected ") + what +
                           " is zero with non-zero observed value; the "
                           "chance model is degenerate for this corpus");
    return 1.0 - obs / exp;
  };
  result.gamma =
      chance_corrected(result.observed_disorder, result.expected_disorder,
                       "disorder");
  result.gamma_cat =
      chance_corrected(result.observed_cat, result.expected_cat,
                       "categorical disorder");
  return result;
}

}  // namespace fallax
