// fallax: command-line toolkit for multi-annotator fallacy-span corpora.
//
// Exit codes: 0 success, 1 data/validation failure, 2 usage error.
// Reports go to stdout (or --output); diagnostics go to stderr.

#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fallax/fallax.hpp"

namespace {

/// Flag-level misuse detected after CLI11 parsing (maps to exit code 2).
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void emit(const std::string& report, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << report;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + output_path);
  out << report;
  if (!out) throw std::runtime_error("cannot write output file: " + output_path);
}

/// Parses a corpus file, repairing violations and warning about each on
/// stderr.  Used by the analysis-style subcommands, which should still run
/// on imperfect data.
fallax::Corpus load_corpus_lenient(const std::string& path) {
  const std::string content = slurp(path);
  std::istringstream in(content);
  fallax::ValidationResult vr = fallax::validate_stream(in);
  for (const fallax::Violation& v : vr.violations)
    std::cerr << "warning: " << path << ": post \"" << v.post_id
              << "\": " << fallax::violation_kind_name(v.kind) << ": "
              << v.message << "\n";
  return std::move(vr.corpus);
}

/// Parses a corpus file strictly: the first problem raises an error naming
/// the file and line.  Used where downstream numbers must not silently rest
/// on repaired data.
fallax::Corpus load_corpus_strict(const std::string& path) {
  const std::string content = slurp(path);
  const auto format = fallax::detect_format(content);
  if (content.find_first_not_of(" \t\r\n") == std::string::npos)
    return fallax::Corpus{};
  if (!format)
    throw fallax::FormatError(path +
                              ": cannot detect file format (expected a JSON "
                              "record stream or a tabular token file)");
  std::istringstream in(content);
  try {
    return *format == fallax::FileFormat::Records
               ? fallax::parse_corpus_records(in)
               : fallax::parse_conll(in);
  } catch (const fallax::FormatError& e) {
    throw fallax::FormatError(path + ": " + e.what());
  }
}

fallax::Taxonomy load_taxonomy_or_default(const std::string& path) {
  if (path.empty()) return fallax::Taxonomy::defaults();
  const std::string content = slurp(path);
  std::istringstream in(content);
  try {
    return fallax::Taxonomy::load(in);
  } catch (const fallax::TaxonomyError& e) {
    throw fallax::TaxonomyError(path + ": " + e.what());
  }
}

struct Options {
  std::string report_format = "json";
  std::string output;

  std::string input;  // positional corpus file

  // convert
  std::string convert_to;

  // stats
  std::vector<std::string> stat_views;
  bool pooled = false;

  // overlaps
  std::string granularity = "fine";
  std::string taxonomy_path;

  // tokens-informative
  std::string label_code;
  int top_k = 10;
  std::string stopwords_path;

  // split
  int fold_k = 5;
  std::uint64_t split_seed = 0;
  std::string stratify;
  std::string out_dir;

  // score
  std::string gold_path;
  std::string pred_path;
  std::string task = "span-f";
  std::string mode = "strict";
  double delta = 0.5;
  std::string folds_dir;
  bool cap_per_span = false;
  bool symmetric_soft = false;

  // agree
  std::string views_csv;
  double alpha = 1.0;
  double beta = 1.0;
  double delta_empty = 1.0;
  int resamples = 30;
  std::uint64_t agree_seed = 42;

  // generate
  std::string config_path;
};

bool tsv(const Options& o) { return o.report_format == "tsv"; }

int run_validate(const Options& o) {
  const std::string content = slurp(o.input);
  std::istringstream in(content);
  fallax::ValidationResult vr = fallax::validate_stream(in);
  emit(tsv(o) ? fallax::render_violations_tsv(vr.violations)
              : fallax::render_violations_json(vr.violations),
       o.output);
  return vr.violations.empty() ? 0 : 1;
}

int run_convert(const Options& o) {
  const fallax::Corpus c = fallax::normalized(load_corpus_lenient(o.input));
  emit(o.convert_to == "records" ? fallax::corpus_records_string(c)
                                 : fallax::conll_string(c),
       o.output);
  return 0;
}

int run_stats(const Options& o) {
  const fallax::Corpus c = load_corpus_lenient(o.input);
  fallax::StatsReport r = o.stat_views.empty()
                              ? fallax::corpus_stats(c)
                              : fallax::corpus_stats(c, o.stat_views);
  if (o.pooled) r.per_view.clear();
  emit(tsv(o) ? fallax::render_stats_tsv(r) : fallax::render_stats_json(r),
       o.output);
  return 0;
}

int run_overlaps(const Options& o) {
  const fallax::Taxonomy tax = load_taxonomy_or_default(o.taxonomy_path);
  const fallax::Corpus c = load_corpus_lenient(o.input);
  const auto gran = o.granularity == "coarse" ? fallax::Granularity::Coarse
                                              : fallax::Granularity::Fine;
  const fallax::OverlapMatrix m =
      fallax::overlap_matrix(c, c.view_ids, gran, tax);
  emit(tsv(o) ? fallax::render_overlap_tsv(m) : fallax::render_overlap_json(m),
       o.output);
  return 0;
}

int run_tokens(const Options& o) {
  const auto label = fallax::parse_label(o.label_code);
  if (!label) throw UsageError("unknown label code: " + o.label_code);
  std::set<std::string> stopwords;
  if (!o.stopwords_path.empty()) {
    const std::string content = slurp(o.stopwords_path);
    std::istringstream in(content);
    stopwords = fallax::load_stopwords(in);
  }
  const fallax::Corpus c = load_corpus_lenient(o.input);
  const auto scores = fallax::informative_tokens(c, *label, o.top_k, stopwords);
  emit(tsv(o) ? fallax::render_tokens_tsv(scores)
              : fallax::render_tokens_json(scores, *label, o.top_k),
       o.output);
  return 0;
}

int run_split(const Options& o) {
  const fallax::Corpus c = load_corpus_lenient(o.input);
  const fallax::FoldSet fs =
      fallax::make_folds(c, o.fold_k, o.split_seed, o.stratify == "topic");
  fallax::write_folds(fs, o.out_dir);

  std::string report;
  if (tsv(o)) {
    report = "fold\ttrain\tdev\ttest\n";
    for (std::size_t i = 0; i < fs.folds.size(); ++i)
      report += "fold" + std::to_string(i) + "\t" +
                std::to_string(fs.folds[i].train.size()) + "\t" +
                std::to_string(fs.folds[i].dev.size()) + "\t" +
                std::to_string(fs.folds[i].test.size()) + "\n";
  } else {
    nlohmann::ordered_json j;
    j["k"] = fs.k;
    j["seed"] = fs.seed;
    j["stratify"] = fs.stratify.empty() ? "none" : fs.stratify;
    j["out"] = o.out_dir;
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < fs.folds.size(); ++i) {
      nlohmann::ordered_json fj;
      fj["name"] = "fold" + std::to_string(i);
      fj["train"] = fs.folds[i].train.size();
      fj["dev"] = fs.folds[i].dev.size();
      fj["test"] = fs.folds[i].test.size();
      folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
    report = j.dump(2) + "\n";
  }
  emit(report, o.output);
  return 0;
}

int run_score(const Options& o) {
  fallax::ScoringConfig cfg;
  cfg.task = *fallax::parse_task(o.task);
  cfg.mode = *fallax::parse_mode(o.mode);
  cfg.delta_partial = o.delta;
  cfg.cap_per_span = o.cap_per_span;
  cfg.symmetric_soft = o.symmetric_soft;
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fallax::Taxonomy tax = load_taxonomy_or_default(o.taxonomy_path);
  const fallax::Corpus gold = load_corpus_strict(o.gold_path);

  const std::string pred_content = slurp(o.pred_path);
  std::istringstream pred_in(pred_content);
  fallax::PredictionSet preds;
  try {
    preds = fallax::parse_predictions(pred_in);
  } catch (const fallax::FormatError& e) {
    throw fallax::FormatError(o.pred_path + ": " + e.what());
  }

  std::vector<fallax::FoldSpec> folds;
  if (!o.folds_dir.empty()) folds = fallax::read_fold_tests(o.folds_dir);

  const fallax::EvalReport r = fallax::evaluate(gold, preds, tax, cfg, folds);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
  emit(tsv(o) ? fallax::render_eval_tsv(r) : fallax::render_eval_json(r),
       o.output);
  return 0;
}

int run_agree(const Options& o) {
  const auto comma = o.views_csv.find(',');
  if (comma == std::string::npos || o.views_csv.find(',', comma + 1) !=
                                        std::string::npos)
    throw UsageError("--views takes exactly two annotator ids, e.g. A1,A2");
  const std::string view_a = o.views_csv.substr(0, comma);
  const std::string view_b = o.views_csv.substr(comma + 1);
  if (view_a.empty() || view_b.empty())
    throw UsageError("--views annotator ids must be non-empty");
  if (view_a == view_b)
    throw UsageError("--views annotator ids must be distinct");

  fallax::AgreementConfig cfg;
  cfg.alpha = o.alpha;
  cfg.beta = o.beta;
  cfg.delta_empty = o.delta_empty;
  cfg.resamples = o.resamples;
  cfg.seed = o.agree_seed;
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fallax::Corpus c = load_corpus_lenient(o.input);
  const fallax::AgreementResult r =
      fallax::compute_gamma(c, view_a, view_b, cfg);
  emit(tsv(o) ? fallax::render_agreement_tsv(r)
              : fallax::render_agreement_json(r),
       o.output);
  return 0;
}

int run_generate(const Options& o) {
  const std::string content = slurp(o.config_path);
  std::istringstream in(content);
  fallax::GenConfig cfg;
  try {
    cfg = fallax::parse_gen_config(in);
  } catch (const fallax::FormatError& e) {
    throw fallax::FormatError(o.config_path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(o.config_path + ": " + e.what());
  }
  emit(fallax::corpus_records_string(fallax::generate(cfg)), o.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{
      "Toolkit for multi-annotator fallacy-span corpora: validation, format "
      "conversion, statistics, overlap and keyword analysis, deterministic "
      "splits, prediction scoring, inter-annotator agreement, and synthetic "
      "data generation."};
  app.require_subcommand(1);
  app.add_option("--report", o.report_format,
                 "Report format for analysis output")
      ->check(CLI::IsMember({"json", "tsv"}))
      ->capture_default_str();
  app.add_option("-o,--output", o.output,
                 "Write the report to this file instead of stdout");

  auto* validate = app.add_subcommand(
      "validate", "Check a corpus file and list every violation");
  validate->add_option("file", o.input, "Corpus file (records or tabular)")
      ->required();

  auto* convert =
      app.add_subcommand("convert", "Convert a corpus between file formats");
  convert->add_option("file", o.input, "Corpus file (records or tabular)")
      ->required();
  convert->add_option("--to", o.convert_to, "Target format")
      ->required()
      ->check(CLI::IsMember({"records", "conll"}));

  auto* stats = app.add_subcommand(
      "stats", "Span counts, lengths, and densities per annotator view");
  stats->add_option("file", o.input, "Corpus file")->required();
  auto* view_opt = stats->add_option(
      "--view", o.stat_views, "Restrict to one or more annotator views");
  stats->add_flag("--pooled", o.pooled,
                  "Report only the block pooled across views")
      ->excludes(view_opt);

  auto* overlaps = app.add_subcommand(
      "overlaps", "Label co-occurrence matrix over covered tokens");
  overlaps->add_option("file", o.input, "Corpus file")->required();
  overlaps->add_option("--granularity", o.granularity, "Label granularity")
      ->check(CLI::IsMember({"fine", "coarse"}))
      ->capture_default_str();
  overlaps->add_option("--taxonomy", o.taxonomy_path,
                       "Label hierarchy file (tab-separated child/parent)");

  auto* tokens = app.add_subcommand(
      "tokens-informative",
      "Tokens most associated with one label inside annotated spans");
  tokens->add_option("file", o.input, "Corpus file")->required();
  tokens->add_option("--label", o.label_code, "Label code, e.g. LL")
      ->required();
  tokens->add_option("--k", o.top_k, "Number of tokens to report")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tokens->add_option("--stopwords", o.stopwords_path,
                     "File with one stopword per line");

  auto* split = app.add_subcommand(
      "split", "Write deterministic cross-validation folds");
  split->add_option("file", o.input, "Corpus file")->required();
  split->add_option("--k", o.fold_k, "Number of folds")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  split->add_option("--seed", o.split_seed, "Shuffle seed")
      ->capture_default_str();
  split->add_option("--stratify", o.stratify, "Stratification key")
      ->check(CLI::IsMember({"topic"}));
  split->add_option("--out", o.out_dir, "Directory for fold id files")
      ->required();

  auto* score = app.add_subcommand(
      "score", "Score predictions against a multi-view gold corpus");
  score->add_option("--gold", o.gold_path, "Gold corpus file")->required();
  score->add_option("--pred", o.pred_path, "Prediction record file")
      ->required();
  score->add_option("--task", o.task, "Evaluation task")
      ->required()
      ->check(CLI::IsMember({"post-c", "post-f", "span-c", "span-f"}));
  score->add_option("--mode", o.mode, "Matching mode")
      ->check(CLI::IsMember({"strict", "soft"}))
      ->capture_default_str();
  score->add_option("--delta", o.delta,
                    "Credit for a label that is the immediate parent of the "
                    "gold label (soft mode)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  score->add_option("--taxonomy", o.taxonomy_path,
                    "Label hierarchy file (tab-separated child/parent)");
  score->add_option("--folds", o.folds_dir,
                    "Fold directory from the split subcommand; adds per-fold "
                    "blocks and their mean/std");
  score->add_flag("--cap-per-span", o.cap_per_span,
                  "Clamp each span's accumulated credit to 1");
  score->add_flag("--symmetric-soft", o.symmetric_soft,
                  "Also credit predictions whose gold label is their "
                  "immediate parent");

  auto* agree = app.add_subcommand(
      "agree", "Chance-corrected inter-annotator agreement for two views");
  agree->add_option("file", o.input, "Corpus file")->required();
  agree->add_option("--views", o.views_csv, "Two annotator ids, e.g. A1,A2")
      ->required();
  agree->add_option("--alpha", o.alpha, "Positional weight")
      ->capture_default_str();
  agree->add_option("--beta", o.beta, "Categorical weight")
      ->capture_default_str();
  agree->add_option("--delta-empty", o.delta_empty, "Unpaired-unit penalty")
      ->capture_default_str();
  agree->add_option("--resamples", o.resamples, "Chance-model rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  agree->add_option("--seed", o.agree_seed, "Chance-model seed")
      ->capture_default_str();

  auto* generate = app.add_subcommand(
      "generate", "Emit a synthetic corpus in the record format");
  generate->add_option("--config", o.config_path, "JSON generator config")
      ->required();

  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return run_validate(o);
    if (app.got_subcommand(convert)) return run_convert(o);
    if (app.got_subcommand(stats)) return run_stats(o);
    if (app.got_subcommand(overlaps)) return run_overlaps(o);
    if (app.got_subcommand(tokens)) return run_tokens(o);
    if (app.got_subcommand(split)) return run_split(o);
    if (app.got_subcommand(score)) return run_score(o);
    if (app.got_subcommand(agree)) return run_agree(o);
    if (app.got_subcommand(generate)) return run_generate(o);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
