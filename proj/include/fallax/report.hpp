#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fallax/agreement.hpp"
#include "fallax/analysis.hpp"
#include "fallax/scoring.hpp"
#include "fallax/violation.hpp"

namespace fallax {

enum class ReportFormat { Json, Tsv };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "tsv") return ReportFormat::Tsv;
  return std::nullopt;
}

namespace detail {

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline nlohmann::ordered_json triple_json(const MetricTriple& t) {
  nlohmann::ordered_json j;
  j["precision"] = t.precision;
  j["recall"] = t.recall;
  j["f1"] = t.f1;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------- scoring

inline std::string render_eval_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["task"] = task_name(r.task);
  j["mode"] = mode_name(r.mode);
  j["delta"] = r.delta_partial;
  j["cap_per_span"] = r.cap_per_span;
  j["symmetric_soft"] = r.symmetric_soft;
  nlohmann::ordered_json views = nlohmann::ordered_json::object();
  for (const auto& [vid, t] : r.per_view) views[vid] = detail::triple_json(t);
  j["per_view"] = std::move(views);
  j["aggregate"] = detail::triple_json(r.aggregate);
  if (r.has_folds) {
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& fr : r.per_fold) {
      nlohmann::ordered_json fj;
      fj["name"] = fr.name;
      nlohmann::ordered_json fviews = nlohmann::ordered_json::object();
      for (const auto& [vid, t] : fr.per_view)
        fviews[vid] = detail::triple_json(t);
      fj["per_view"] = std::move(fviews);
      fj["aggregate"] = detail::triple_json(fr.aggregate);
      folds.push_back(std::move(fj));
    }
    j["per_fold"] = std::move(folds);
    j["fold_mean"] = detail::triple_json(r.fold_mean);
    j["fold_std"] = detail::triple_json(r.fold_std);
  }
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  j["notes"] = nlohmann::ordered_json::array(
      {"aggregate averages per-view precision, recall, and F1 independently",
       "empty gold and empty prediction sets score 1; a one-sided empty set "
       "scores 0",
       "fold std is the population standard deviation"});
  return j.dump(2) + "\n";
}

inline std::string render_eval_tsv(const EvalReport& r) {
  std::string out = "fold\tview\tprecision\trecall\tf1\n";
  auto row = [&](const std::string& fold, const std::string& view,
                 const MetricTriple& t) {
    out += fold + "\t" + view + "\t" + detail::fixed6(t.precision) + "\t" +
           detail::fixed6(t.recall) + "\t" + detail::fixed6(t.f1) + "\n";
  };
  for (const auto& [vid, t] : r.per_view) row("all", vid, t);
  row("all", "aggregate", r.aggregate);
  for (const auto& fr : r.per_fold) {
    for (const auto& [vid, t] : fr.per_view) row(fr.name, vid, t);
    row(fr.name, "aggregate", fr.aggregate);
  }
  if (r.has_folds) {
    row("mean", "aggregate", r.fold_mean);
    row("std", "aggregate", r.fold_std);
  }
  return out;
}

// ------------------------------------------------------------- violations

inline std::string render_violations_json(const std::vector<Violation>& vs) {
  nlohmann::ordered_json j;
  j["count"] = vs.size();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Violation& v : vs) {
    nlohmann::ordered_json vj;
    vj["post_id"] = v.post_id;
    vj["kind"] = std::string(violation_kind_name(v.kind));
    vj["message"] = v.message;
    arr.push_back(std::move(vj));
  }
  j["violations"] = std::move(arr);
  return j.dump(2) + "\n";
}

inline std::string render_violations_tsv(const std::vector<Violation>& vs) {
  std::string out = "post_id\tkind\tmessage\n";
  for (const Violation& v : vs)
    out += v.post_id + "\t" + std::string(violation_kind_name(v.kind)) + "\t" +
           v.message + "\n";
  return out;
}

// ------------------------------------------------------------------ stats

namespace detail {

inline nlohmann::ordered_json view_stats_json(const ViewStats& v) {
  nlohmann::ordered_json j;
  j["id"] = v.id;
  j["total_spans"] = v.total_spans;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const auto& [label, s] : v.per_label) {
    nlohmann::ordered_json lj;
    lj["label"] = std::string(code(label));
    lj["name"] = std::string(display_name(label));
    lj["count"] = s.count;
    lj["mean_length"] = s.mean_length;
    lj["std_length"] = s.std_length;
    labels.push_back(std::move(lj));
  }
  j["per_label"] = std::move(labels);
  return j;
}

}  // namespace detail

inline std::string render_stats_json(const StatsReport& r) {
  nlohmann::ordered_json j;
  j["posts"] = r.posts;
  j["total_tokens"] = r.total_tokens;
  j["density_mean"] = r.density_mean;
  j["density_std"] = r.density_std;
  nlohmann::ordered_json views = nlohmann::ordered_json::array();
  for (const ViewStats& v : r.per_view)
    views.push_back(detail::view_stats_json(v));
  j["views"] = std::move(views);
  j["combined"] = detail::view_stats_json(r.combined);
  j["notes"] = nlohmann::ordered_json::array(
      {"lengths in tokens; std is the population standard deviation",
       "density is spans per post, mean and std across the selected views"});
  return j.dump(2) + "\n";
}

inline std::string render_stats_tsv(const StatsReport& r) {
  std::string out = "scope\tlabel\tcount\tmean_length\tstd_length\n";
  out += "corpus\tposts\t" + std::to_string(r.posts) + "\t\t\n";
  out += "corpus\ttokens\t" + std::to_string(r.total_tokens) + "\t\t\n";
  out += "corpus\tdensity\t\t" + detail::fixed6(r.density_mean) + "\t" +
         detail::fixed6(r.density_std) + "\n";
  auto block = [&](const ViewStats& v) {
    for (const auto& [label, s] : v.per_label)
      out += v.id + "\t" + std::string(code(label)) + "\t" +
             std::to_string(s.count) + "\t" + detail::fixed6(s.mean_length) +
             "\t" + detail::fixed6(s.std_length) + "\n";
    out += v.id + "\tTOTAL\t" + std::to_string(v.total_spans) + "\t\t\n";
  };
  for (const ViewStats& v : r.per_view) block(v);
  block(r.combined);
  return out;
}

// ---------------------------------------------------------------- overlap

inline std::string render_overlap_json(const OverlapMatrix& m) {
  nlohmann::ordered_json j;
  j["granularity"] = m.granularity == Granularity::Fine ? "fine" : "coarse";
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (Label l : m.labels) labels.push_back(std::string(code(l)));
  j["labels"] = std::move(labels);
  nlohmann::ordered_json base = nlohmann::ordered_json::array();
  for (long long b : m.base) base.push_back(b);
  j["base_occurrences"] = std::move(base);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < m.labels.size(); ++f) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < m.labels.size(); ++g) {
      if (!m.defined[f])
        row.push_back(nullptr);
      else
        row.push_back(m.cells[f][g]);
    }
    rows.push_back(std::move(row));
  }
  j["cells"] = std::move(rows);
  j["notes"] = nlohmann::ordered_json::array(
      {"cells are percentages of the row label's covered token occurrences",
       "diagonal holds the percentage covered by no other label",
       "null rows have no covered occurrences"});
  return j.dump(2) + "\n";
}

inline std::string render_overlap_tsv(const OverlapMatrix& m) {
  std::string out = "label";
  for (Label l : m.labels) out += "\t" + std::string(code(l));
  out += "\n";
  for (std::size_t f = 0; f < m.labels.size(); ++f) {
    out += std::string(code(m.labels[f]));
    for (std::size_t g = 0; g < m.labels.size(); ++g)
      out += "\t" + (m.defined[f] ? detail::fixed2(m.cells[f][g])
                                  : std::string("NA"));
    out += "\n";
  }
  return out;
}

// ----------------------------------------------------------------- tokens

inline std::string render_tokens_json(const std::vector<TokenScore>& ts,
                                      Label label, int k) {
  nlohmann::ordered_json j;
  j["label"] = std::string(code(label));
  j["k"] = k;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const TokenScore& t : ts) {
    nlohmann::ordered_json tj;
    tj["token"] = t.token;
    tj["score"] = t.score;
    tj["count"] = t.count;
    arr.push_back(std::move(tj));
  }
  j["tokens"] = std::move(arr);
  return j.dump(2) + "\n";
}

inline std::string render_tokens_tsv(const std::vector<TokenScore>& ts) {
  std::string out = "rank\ttoken\tscore\tcount\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    out += std::to_string(i + 1) + "\t" + ts[i].token + "\t" +
           detail::fixed6(ts[i].score) + "\t" + std::to_string(ts[i].count) +
           "\n";
  return out;
}

// -------------------------------------------------------------- agreement

inline std::string render_agreement_json(const AgreementResult& r) {
  nlohmann::ordered_json j;
  j["gamma"] = r.gamma;
  j["gamma_cat"] = r.gamma_cat;
  j["observed_disorder"] = r.observed_disorder;
  j["expected_disorder"] = r.expected_disorder;
  j["observed_cat"] = r.observed_cat;
  j["expected_cat"] = r.expected_cat;
  j["method"] = r.method;
  j["views"] = nlohmann::ordered_json::array({r.view_a, r.view_b});
  nlohmann::ordered_json cj;
  cj["alpha"] = r.config.alpha;
  cj["beta"] = r.config.beta;
  cj["delta_empty"] = r.config.delta_empty;
  cj["resamples"] = r.config.resamples;
  cj["seed"] = r.config.seed;
  j["config"] = std::move(cj);
  j["per_round_expected"] = r.per_round_expected;
  j["per_round_expected_cat"] = r.per_round_expected_cat;
  return j.dump(2) + "\n";
}

inline std::string render_agreement_tsv(const AgreementResult& r) {
  std::string out = "key\tvalue\n";
  out += "gamma\t" + detail::fixed6(r.gamma) + "\n";
  out += "gamma_cat\t" + detail::fixed6(r.gamma_cat) + "\n";
  out += "observed_disorder\t" + detail::fixed6(r.observed_disorder) + "\n";
  out += "expected_disorder\t" + detail::fixed6(r.expected_disorder) + "\n";
  out += "observed_cat\t" + detail::fixed6(r.observed_cat) + "\n";
  out += "expected_cat\t" + detail::fixed6(r.expected_cat) + "\n";
  out += "method\t" + r.method + "\n";
  out += "views\t" + r.view_a + "," + r.view_b + "\n";
  out += "alpha\t" + detail::fixed6(r.config.alpha) + "\n";
  out += "beta\t" + detail::fixed6(r.config.beta) + "\n";
  out += "delta_empty\t" + detail::fixed6(r.config.delta_empty) + "\n";
  out += "resamples\t" + std::to_string(r.config.resamples) + "\n";
  out += "seed\t" + std::to_string(r.config.seed) + "\n";
  return out;
}

}  // namespace fallax
