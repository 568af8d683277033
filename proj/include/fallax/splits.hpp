#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fallax/corpus.hpp"
#include "fallax/rng.hpp"
#include "fallax/scoring.hpp"

namespace fallax {

/// One cross-validation fold: held-out test ids plus an 80/20 train/dev
/// subdivision of the rest.
struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

struct FoldSet {
  int k = 5;
  std::uint64_t seed = 0;
  std::string stratify;  // "" or "topic"
  std::vector<Fold> folds;
};

namespace detail {

/// Chunk boundaries for splitting n items into k nearly equal parts
/// (sizes differ by at most 1, remainder going to the first parts).
inline std::vector<std::pair<std::size_t, std::size_t>> chunk_bounds(
    std::size_t n, int k) {
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  const std::size_t q = n / static_cast<std::size_t>(k);
  const std::size_t r = n % static_cast<std::size_t>(k);
  std::size_t at = 0;
  for (int i = 0; i < k; ++i) {
    const std::size_t size = q + (static_cast<std::size_t>(i) < r ? 1 : 0);
    bounds.emplace_back(at, at + size);
    at += size;
  }
  return bounds;
}

}  // namespace detail

/// Deterministic k-fold splitter. Post ids are shuffled by the documented
/// PRNG (splitmix-seeded xoshiro generator, modulo-bounded draws,
/// Fisher–Yates), cut into k test folds as equally as possible (remainder
/// to the first folds), and each fold's remaining pool is subdivided with
/// the last round(20%) as dev. Stratified mode shuffles and cuts within
/// each stratum (strata in lexicographic topic order, sharing one PRNG
/// stream) and concatenates per-stratum chunks.
inline FoldSet make_folds(const Corpus& c, int k, std::uint64_t seed,
                          bool stratify_topic = false) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (c.post_count() < static_cast<std::size_t>(k))
    throw std::invalid_argument("corpus has fewer posts than folds");

  FoldSet out;
  out.k = k;
  out.seed = seed;
  out.stratify = stratify_topic ? "topic" : "";
  out.folds.resize(static_cast<std::size_t>(k));

  Xoshiro256StarStar rng(seed);

  // strata in deterministic order: one unnamed stratum, or topics sorted
  std::vector<std::pair<std::string, std::vector<std::string>>> strata;
  if (!stratify_topic) {
    std::vector<std::string> ids;
    for (const Post& p : c.posts) ids.push_back(p.id);
    strata.emplace_back("", std::move(ids));
  } else {
    std::map<std::string, std::vector<std::string>> by_topic;
    for (const Post& p : c.posts) by_topic[p.topic].push_back(p.id);
    for (auto& [topic, ids] : by_topic) {
      if (ids.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("stratum \"" + topic + "\" has " +
                                    std::to_string(ids.size()) +
                                    " posts, fewer than k=" + std::to_string(k));
      strata.emplace_back(topic, std::move(ids));
    }
  }

  // per-fold pools in shuffle order, test chunks cut per stratum
  std::vector<std::vector<std::string>> pools(static_cast<std::size_t>(k));
  for (auto& [topic, ids] : strata) {
    fisher_yates(ids, rng);
    const auto bounds = detail::chunk_bounds(ids.size(), k);
    for (int f = 0; f < k; ++f) {
      const auto [lo, hi] = bounds[static_cast<std::size_t>(f)];
      Fold& fold = out.folds[static_cast<std::size_t>(f)];
      for (std::size_t i = lo; i < hi; ++i) fold.test.push_back(ids[i]);
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (i < lo || i >= hi)
          pools[static_cast<std::size_t>(f)].push_back(ids[i]);
    }
  }

  for (int f = 0; f < k; ++f) {
    const std::vector<std::string>& pool = pools[static_cast<std::size_t>(f)];
    const std::size_t dev_size = static_cast<std::size_t>(
        std::llround(0.2 * static_cast<double>(pool.size())));
    const std::size_t train_size = pool.size() - dev_size;
    Fold& fold = out.folds[static_cast<std::size_t>(f)];
    fold.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(train_size));
    fold.dev.assign(pool.begin() + static_cast<std::ptrdiff_t>(train_size), pool.end());
  }
  return out;
}

/// Write `fold<i>.{train,dev,test}.ids` (one id per line, 0-based fold
/// numbering) plus `manifest.json` echoing the configuration.
inline void write_folds(const FoldSet& fs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_ids = [&](const std::filesystem::path& path,
                       const std::vector<std::string>& ids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const std::string& id : ids) out << id << '\n';
  };
  nlohmann::ordered_json manifest;
  manifest["k"] = fs.k;
  manifest["seed"] = fs.seed;
  manifest["stratify"] = fs.stratify.empty() ? "none" : fs.stratify;
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (int f = 0; f < fs.k; ++f) {
    const Fold& fold = fs.folds[static_cast<std::size_t>(f)];
    const std::string stem = "fold" + std::to_string(f);
    write_ids(dir / (stem + ".train.ids"), fold.train);
    write_ids(dir / (stem + ".dev.ids"), fold.dev);
    write_ids(dir / (stem + ".test.ids"), fold.test);
    nlohmann::ordered_json fj;
    fj["fold"] = f;
    fj["train"] = fold.train.size();
    fj["dev"] = fold.dev.size();
    fj["test"] = fold.test.size();
    folds.push_back(std::move(fj));
  }
  manifest["folds"] = std::move(folds);
  std::ofstream mout(dir / "manifest.json");
  if (!mout)
    throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  mout << manifest.dump(2) << '\n';
}

/// Read the test-id files of a fold directory (fold0.test.ids, ...) for
/// per-fold evaluation.
inline std::vector<FoldSpec> read_fold_tests(const std::filesystem::path& dir) {
  std::vector<FoldSpec> out;
  for (int f = 0;; ++f) {
    const std::filesystem::path path =
        dir / ("fold" + std::to_string(f) + ".test.ids");
    if (!std::filesystem::exists(path)) break;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    FoldSpec spec;
    spec.name = "fold" + std::to_string(f);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) spec.test_ids.push_back(line);
    }
    out.push_back(std::move(spec));
  }
  if (out.empty())
    throw std::runtime_error("no fold<i>.test.ids files found in " +
                             dir.string());
  return out;
}

}  // namespace fallax
