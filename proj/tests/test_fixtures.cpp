#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "fallax/generate.hpp"
#include "fallax/scoring.hpp"
#include "fallax/validate.hpp"
#include "testutil.hpp"

using namespace fallax;

namespace {

GenConfig base_cfg() {
  GenConfig cfg;
  cfg.posts = 20;
  cfg.min_tokens = 10;
  cfg.max_tokens = 30;
  cfg.min_spans = 1;
  cfg.max_spans = 4;
  cfg.min_span_len = 2;
  cfg.max_span_len = 6;
  return cfg;
}

/// Mean strict span-level F1 of the perturbed view against the source view,
/// pooled over each corpus, averaged over seeds.
double mean_f1(GenConfig cfg, int seeds) {
  static const Taxonomy tax = Taxonomy::defaults();
  ScoringConfig sc;
  sc.task = Task::SpanF;
  sc.mode = Mode::Strict;
  double sum = 0;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(1000 + s);
    const Corpus c = generate(cfg);
    sum += score_spans(testutil::pooled(c, "A1"), testutil::pooled(c, "A2"),
                       tax, sc)
               .f1;
  }
  return sum / seeds;
}

}  // namespace

TEST_CASE("without perturbation the second view replicates the first") {
  GenConfig cfg = base_cfg();
  const Corpus c = generate(cfg);
  REQUIRE(c.posts.size() == 20);
  CHECK(c.view_ids == std::vector<std::string>{"A1", "A2"});
  for (const Post& p : c.posts) {
    REQUIRE(p.views.size() == 2);
    CHECK(p.views[0].annotator_id == "A1");
    CHECK(p.views[1].annotator_id == "A2");
    CHECK(p.views[0].spans == p.views[1].spans);
    CHECK(p.token_count() >= 10);
    CHECK(p.token_count() <= 30);
  }
}

TEST_CASE("dropping every span empties the perturbed view") {
  GenConfig cfg = base_cfg();
  cfg.drop = 1.0;
  const Corpus c = generate(cfg);
  for (const Post& p : c.posts) {
    CHECK_FALSE(p.views[0].spans.empty());
    CHECK(p.views[1].spans.empty());
  }
}

TEST_CASE("full confusion flips labels but keeps boundaries") {
  GenConfig cfg = base_cfg();
  cfg.min_spans = 1;
  cfg.max_spans = 1;
  cfg.label_set = {Label::LL, Label::NC};
  cfg.confusion = 1.0;
  const Corpus c = generate(cfg);
  for (const Post& p : c.posts) {
    REQUIRE(p.views[0].spans.size() == 1);
    REQUIRE(p.views[1].spans.size() == 1);
    const FallacySpan& a = p.views[0].spans[0];
    const FallacySpan& b = p.views[1].spans[0];
    CHECK(a.start == b.start);
    CHECK(a.end == b.end);
    CHECK(a.label != b.label);
  }
}

TEST_CASE("insertion grows the perturbed view on average") {
  GenConfig cfg = base_cfg();
  cfg.posts = 200;
  cfg.min_spans = 4;
  cfg.max_spans = 4;
  cfg.insert = 0.5;
  const Corpus c = generate(cfg);
  double a1 = 0, a2 = 0;
  for (const Post& p : c.posts) {
    a1 += static_cast<double>(p.views[0].spans.size());
    a2 += static_cast<double>(p.views[1].spans.size());
  }
  a1 /= 200;
  a2 /= 200;
  CHECK(a2 > a1 + 0.5);  // expectation is +2 per post, minus rare merges
}

TEST_CASE("generated corpora always validate cleanly") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Corpus c = testutil::small_random_corpus(seed, 8, 25, 5);
    CAPTURE(seed);
    CHECK(validate(c).empty());
  }
  GenConfig harsh = base_cfg();
  harsh.jitter_sigma = 4.0;
  harsh.confusion = 0.9;
  harsh.drop = 0.3;
  harsh.insert = 0.9;
  harsh.min_tokens = 2;
  harsh.max_tokens = 6;
  harsh.min_span_len = 1;
  harsh.max_span_len = 8;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    harsh.seed = seed;
    CAPTURE(seed);
    CHECK(validate(generate(harsh)).empty());
  }
}

TEST_CASE("generation is deterministic and post streams are independent") {
  GenConfig cfg = base_cfg();
  cfg.jitter_sigma = 1.0;
  cfg.confusion = 0.3;
  cfg.seed = 77;
  const Corpus a = generate(cfg);
  const Corpus b = generate(cfg);
  CHECK(a == b);

  cfg.seed = 78;
  CHECK_FALSE(a == generate(cfg));

  // the first posts do not depend on how many posts follow
  GenConfig small = base_cfg();
  small.posts = 12;
  small.seed = 5;
  GenConfig large = base_cfg();
  large.posts = 99;
  large.seed = 5;
  const Corpus cs = generate(small);
  const Corpus cl = generate(large);
  for (std::size_t i = 0; i < 12; ++i) CHECK(cs.posts[i] == cl.posts[i]);
}

TEST_CASE("post metadata is structured and padded") {
  GenConfig cfg = base_cfg();
  cfg.posts = 50;
  const Corpus c = generate(cfg);
  CHECK(c.posts[0].id == "p00");
  CHECK(c.posts[49].id == "p49");
  CHECK(c.posts[0].topic == "migration");
  CHECK(c.posts[1].topic == "climate");
  CHECK(c.posts[2].topic == "health");
  CHECK(c.posts[3].topic == "migration");
  CHECK(c.posts[0].date == "2022-01");
  CHECK(c.posts[11].date == "2022-12");
  CHECK(c.posts[12].date == "2022-01");
}

TEST_CASE("each perturbation degrades the span score monotonically") {
  const int seeds = 50;
  const double eps = 0.02;

  SECTION("drop") {
    std::vector<double> scores;
    for (const double p : {0.0, 0.2, 0.5, 0.9}) {
      GenConfig cfg = base_cfg();
      cfg.drop = p;
      scores.push_back(mean_f1(cfg, seeds));
    }
    CHECK(scores[0] == 1.0);
    for (std::size_t i = 1; i < scores.size(); ++i)
      CHECK(scores[i] <= scores[i - 1] + eps);
    CHECK(scores.back() < scores.front() - 0.3);
  }
  SECTION("confusion") {
    std::vector<double> scores;
    for (const double p : {0.0, 0.2, 0.5, 0.9}) {
      GenConfig cfg = base_cfg();
      cfg.confusion = p;
      scores.push_back(mean_f1(cfg, seeds));
    }
    for (std::size_t i = 1; i < scores.size(); ++i)
      CHECK(scores[i] <= scores[i - 1] + eps);
    CHECK(scores.back() < scores.front() - 0.3);
  }
  SECTION("jitter") {
    std::vector<double> scores;
    for (const double sigma : {0.0, 1.0, 3.0, 8.0}) {
      GenConfig cfg = base_cfg();
      cfg.jitter_sigma = sigma;
      scores.push_back(mean_f1(cfg, seeds));
    }
    for (std::size_t i = 1; i < scores.size(); ++i)
      CHECK(scores[i] <= scores[i - 1] + eps);
    CHECK(scores.back() < scores.front() - 0.1);
  }
}

TEST_CASE("generator configuration parsing") {
  SECTION("a full configuration") {
    std::istringstream in(R"({
      "posts": 12,
      "tokens": [6, 18],
      "spans": [1, 3],
      "span_length": [2, 5],
      "labels": ["LL", "NC", "VA"],
      "jitter_sigma": 1.5,
      "confusion": 0.25,
      "drop": 0.1,
      "insert": 0.2,
      "seed": 99
    })");
    const GenConfig cfg = parse_gen_config(in);
    CHECK(cfg.posts == 12);
    CHECK(cfg.min_tokens == 6);
    CHECK(cfg.max_tokens == 18);
    CHECK(cfg.min_spans == 1);
    CHECK(cfg.max_spans == 3);
    CHECK(cfg.min_span_len == 2);
    CHECK(cfg.max_span_len == 5);
    CHECK(cfg.label_set ==
          std::vector<Label>{Label::LL, Label::NC, Label::VA});
    CHECK(cfg.jitter_sigma == 1.5);
    CHECK(cfg.confusion == 0.25);
    CHECK(cfg.drop == 0.1);
    CHECK(cfg.insert == 0.2);
    CHECK(cfg.seed == 99);
  }
  SECTION("defaults survive a minimal configuration") {
    std::istringstream in(R"({"posts": 3})");
    const GenConfig cfg = parse_gen_config(in);
    CHECK(cfg.posts == 3);
    CHECK(cfg.min_tokens == 5);
    CHECK(cfg.max_tokens == 40);
    CHECK(cfg.label_set.empty());
    CHECK(cfg.labels().size() == kFineLabels.size());
  }
  SECTION("rejections") {
    std::istringstream unknown(R"({"post_count": 3})");
    CHECK_THROWS_AS(parse_gen_config(unknown), FormatError);
    std::istringstream badrange(R"({"tokens": [9, 2]})");
    CHECK_THROWS_AS(parse_gen_config(badrange), std::invalid_argument);
    std::istringstream badlabel(R"({"labels": ["XX"]})");
    CHECK_THROWS_AS(parse_gen_config(badlabel), FormatError);
    std::istringstream shortrange(R"({"tokens": [5]})");
    CHECK_THROWS_AS(parse_gen_config(shortrange), FormatError);
    std::istringstream notjson("posts: 3");
    CHECK_THROWS_AS(parse_gen_config(notjson), FormatError);
    std::istringstream notobject("[1,2]");
    CHECK_THROWS_AS(parse_gen_config(notobject), FormatError);
    std::istringstream badprob(R"({"drop": 1.5})");
    CHECK_THROWS_AS(parse_gen_config(badprob), std::invalid_argument);
  }
}
