#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/scoring.hpp"
#include "fallax/taxonomy.hpp"

namespace fallax {

struct LabelStats {
  long long count = 0;
  double mean_length = 0;  // tokens
  double std_length = 0;   // population standard deviation
};

struct ViewStats {
  std::string id;  // annotator id, or "combined" for the pooled block
  long long total_spans = 0;
  std::vector<std::pair<Label, LabelStats>> per_label;  // labels with count > 0
};

struct StatsReport {
  long long posts = 0;
  long long total_tokens = 0;
  double density_mean = 0;  // spans per post, mean across selected views
  double density_std = 0;   // population std across selected views
  std::vector<ViewStats> per_view;
  ViewStats combined;  // all selected views pooled
};

namespace detail {

inline ViewStats stats_from_lengths(
    const std::string& id, const std::map<Label, std::vector<int>>& lengths) {
  ViewStats out;
  out.id = id;
  // emit in enum order (alphabetical by display name)
  std::vector<Label> present;
  for (const auto& [label, ls] : lengths) present.push_back(label);
  std::sort(present.begin(), present.end(), [](Label a, Label b) {
    return label_index(a) < label_index(b);
  });
  for (Label label : present) {
    const std::vector<int>& ls = lengths.at(label);
    if (ls.empty()) continue;
    LabelStats s;
    s.count = static_cast<long long>(ls.size());
    double sum = 0;
    for (int l : ls) sum += l;
    s.mean_length = sum / static_cast<double>(ls.size());
    double sq = 0;
    for (int l : ls) sq += (l - s.mean_length) * (l - s.mean_length);
    s.std_length = std::sqrt(sq / static_cast<double>(ls.size()));
    out.total_spans += s.count;
    out.per_label.emplace_back(label, s);
  }
  return out;
}

inline void check_views(const Corpus& c, const std::vector<std::string>& views) {
  for (const std::string& vid : views) {
    bool found = false;
    for (const std::string& known : c.view_ids)
      if (known == vid) found = true;
    if (!found)
      throw std::invalid_argument("view \"" + vid + "\" not in corpus");
  }
  if (views.empty()) throw std::invalid_argument("no views selected");
}

}  // namespace detail

/// Descriptive statistics over the selected views: per-fallacy span counts
/// and token-length mean±std (population), per view and pooled, plus
/// annotation density (spans/post) reported as mean±std across the views.
inline StatsReport corpus_stats(const Corpus& c,
                                const std::vector<std::string>& views) {
  detail::check_views(c, views);
  StatsReport report;
  report.posts = static_cast<long long>(c.post_count());
  report.total_tokens = static_cast<long long>(c.token_count());

  std::map<Label, std::vector<int>> combined;
  std::vector<double> densities;
  for (const std::string& vid : views) {
    std::map<Label, std::vector<int>> lengths;
    long long spans = 0;
    for (const Post& p : c.posts) {
      const View* v = p.find_view(vid);
      if (!v) continue;
      for (const FallacySpan& s : v->spans) {
        lengths[s.label].push_back(s.length());
        combined[s.label].push_back(s.length());
        ++spans;
      }
    }
    report.per_view.push_back(detail::stats_from_lengths(vid, lengths));
    densities.push_back(report.posts > 0
                            ? static_cast<double>(spans) /
                                  static_cast<double>(report.posts)
                            : 0.0);
  }
  report.combined = detail::stats_from_lengths("combined", combined);

  double dsum = 0;
  for (double d : densities) dsum += d;
  report.density_mean = dsum / static_cast<double>(densities.size());
  double dsq = 0;
  for (double d : densities)
    dsq += (d - report.density_mean) * (d - report.density_mean);
  report.density_std = std::sqrt(dsq / static_cast<double>(densities.size()));
  return report;
}

inline StatsReport corpus_stats(const Corpus& c) {
  return corpus_stats(c, c.view_ids);
}

/// Token-percentage overlap between fallacy types. Rows/columns follow the
/// label inventory; `cells[f][g]` (f≠g) is the percentage of f's covered
/// token occurrences that a g-span also covers in the same view, and the
/// diagonal is the percentage covered by no other label. Rows with no
/// covered occurrences are undefined (`defined[f]` false).
struct OverlapMatrix {
  Granularity granularity = Granularity::Fine;
  std::vector<Label> labels;
  std::vector<std::vector<double>> cells;  // percentages in [0,100]
  std::vector<bool> defined;
  std::vector<long long> base;  // covered token occurrences per row label
};

/// Token occurrences are (view, post, token) triples; pooling across views
/// keeps overlap within-view (annotators never overlap each other).
inline OverlapMatrix overlap_matrix(const Corpus& c,
                                    const std::vector<std::string>& views,
                                    Granularity granularity,
                                    const Taxonomy& tax) {
  detail::check_views(c, views);
  OverlapMatrix m;
  m.granularity = granularity;
  if (granularity == Granularity::Fine)
    m.labels.assign(kFineLabels.begin(), kFineLabels.end());
  else
    m.labels.assign(kMacroLabels.begin(), kMacroLabels.end());

  const std::size_t n = m.labels.size();
  std::vector<int> row_of(kLabelCount, -1);
  for (std::size_t i = 0; i < n; ++i) row_of[label_index(m.labels[i])] = static_cast<int>(i);

  std::vector<std::vector<long long>> hits(n, std::vector<long long>(n, 0));
  std::vector<long long> base(n, 0), alone(n, 0);

  for (const std::string& vid : views) {
    for (const Post& p : c.posts) {
      const View* v = p.find_view(vid);
      if (!v) continue;
      std::vector<FallacySpan> spans = v->spans;
      if (granularity == Granularity::Coarse) spans = to_coarse(spans, tax);
      std::vector<LabelMask> cover(static_cast<std::size_t>(p.token_count()), 0);
      for (const FallacySpan& s : spans)
        for (int i = s.start; i < s.end && i < p.token_count(); ++i)
          cover[static_cast<std::size_t>(i)] |= label_bit(s.label);
      for (LabelMask mask : cover) {
        if (mask == 0) continue;
        for (Label f : mask_labels(mask)) {
          const int fi = row_of[label_index(f)];
          if (fi < 0) continue;
          ++base[static_cast<std::size_t>(fi)];
          if (mask_size(mask) == 1) ++alone[static_cast<std::size_t>(fi)];
          for (Label g : mask_labels(mask)) {
            if (g == f) continue;
            const int gi = row_of[label_index(g)];
            if (gi >= 0) ++hits[static_cast<std::size_t>(fi)][static_cast<std::size_t>(gi)];
          }
        }
      }
    }
  }

  m.cells.assign(n, std::vector<double>(n, 0.0));
  m.defined.assign(n, false);
  m.base.assign(base.begin(), base.end());
  for (std::size_t f = 0; f < n; ++f) {
    if (base[f] == 0) continue;
    m.defined[f] = true;
    for (std::size_t g = 0; g < n; ++g)
      m.cells[f][g] = f == g ? 100.0 * static_cast<double>(alone[f]) /
                                   static_cast<double>(base[f])
                             : 100.0 * static_cast<double>(hits[f][g]) /
                                   static_cast<double>(base[f]);
  }
  return m;
}

struct TokenScore {
  std::string token;
  double score = 0;
  long long count = 0;  // co-occurrence count with the target label
};

inline std::set<std::string> load_stopwords(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t b = 0, e = line.size();
    while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
    while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
    if (e > b && line[b] != '#')
      out.insert(detail::ascii_lower(line.substr(b, e - b)));
  }
  return out;
}

/// Most informative tokens for one fallacy type, by normalized, positive,
/// weighted pointwise mutual information.
///
/// Events are (view, post, token position, covering label) tuples over
/// lowercased, stopword-filtered tokens inside spans. With probabilities
/// from event counts: PMI = log(p(t,f)/(p(t)p(f))), normalized by
/// −log p(t,f) (taken as 1 when p(t,f)=1), and the score is
/// max(0, PMI_n) · log(1 + count(t,f)). Top-k by score, ties broken
/// lexicographically. Lowercasing is ASCII-only; multi-byte characters
/// pass through unchanged.
inline std::vector<TokenScore> informative_tokens(
    const Corpus& c, Label label, int k, const std::set<std::string>& stopwords) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  std::map<std::pair<std::string, Label>, long long> joint;
  std::map<std::string, long long> token_count;
  std::map<Label, long long> label_count;
  long long total = 0;

  for (const Post& p : c.posts) {
    for (const View& v : p.views) {
      std::vector<LabelMask> cover(static_cast<std::size_t>(p.token_count()), 0);
      for (const FallacySpan& s : v.spans)
        for (int i = s.start; i < s.end && i < p.token_count(); ++i)
          cover[static_cast<std::size_t>(i)] |= label_bit(s.label);
      for (int i = 0; i < p.token_count(); ++i) {
        if (cover[static_cast<std::size_t>(i)] == 0) continue;
        const std::string tok =
            detail::ascii_lower(p.tokens[static_cast<std::size_t>(i)]);
        if (stopwords.count(tok)) continue;
        for (Label f : mask_labels(cover[static_cast<std::size_t>(i)])) {
          ++joint[{tok, f}];
          ++token_count[tok];
          ++label_count[f];
          ++total;
        }
      }
    }
  }

  if (label_count.find(label) == label_count.end())
    throw std::invalid_argument(std::string("label ") + std::string(code(label)) +
                                " has no in-span tokens in this corpus");

  std::vector<TokenScore> scored;
  const double n = static_cast<double>(total);
  for (const auto& [key, cnt] : joint) {
    const auto& [tok, f] = key;
    if (f != label) continue;
    const double p_tf = static_cast<double>(cnt) / n;
    const double p_t = static_cast<double>(token_count.at(tok)) / n;
    const double p_f = static_cast<double>(label_count.at(f)) / n;
    const double pmi = std::log(p_tf / (p_t * p_f));
    const double pmi_n = p_tf >= 1.0 ? 1.0 : pmi / (-std::log(p_tf));
    const double score =
        std::max(0.0, pmi_n) * std::log1p(static_cast<double>(cnt));
    scored.push_back(TokenScore{tok, score, cnt});
  }

  std::sort(scored.begin(), scored.end(), [](const TokenScore& a,
                                             const TokenScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  });
  if (static_cast<int>(scored.size()) > k)
    scored.resize(static_cast<std::size_t>(k));
  return scored;
}

}  // namespace fallax
