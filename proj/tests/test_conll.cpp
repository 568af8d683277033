#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "fallax/conll.hpp"
#include "fallax/records.hpp"
#include "fallax/validate.hpp"
#include "testutil.hpp"

using namespace fallax;
using testutil::sp;

namespace {

Corpus parse(const std::string& text, std::vector<Violation>* sink = nullptr) {
  std::istringstream in(text);
  return parse_conll(in, sink);
}

}  // namespace

TEST_CASE("token-format writer emits the documented golden bytes") {
  const Corpus c = testutil::make_corpus({testutil::make_post(
      "p0", 4,
      {testutil::view("A1", {sp(0, 2, Label::LL), sp(0, 1, Label::VA)}),
       testutil::view("A2", {sp(3, 4, Label::AA)})},
      "migration", "2022-03")});
  const std::string expected =
      "# post_id = p0\n"
      "# views = A1 A2\n"
      "# topic = migration\n"
      "# date = 2022-03\n"
      "1\tw0\tB-VA|B-LL\tO\n"
      "2\tw1\tI-LL\tO\n"
      "3\tw2\tO\tO\n"
      "4\tw3\tO\tB-AA\n"
      "\n";
  CHECK(conll_string(c) == expected);
}

TEST_CASE("joined tags on one token decode to overlapping spans") {
  const Corpus c = parse(
      "# post_id = x\n"
      "# views = A1\n"
      "1\ta\tB-LL|B-VA\n"
      "2\tb\tI-LL\n"
      "\n");
  REQUIRE(c.posts.size() == 1);
  const std::vector<FallacySpan>& spans = c.posts[0].views[0].spans;
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == sp(0, 1, Label::VA));
  CHECK(spans[1] == sp(0, 2, Label::LL));
}

TEST_CASE("token format round-trips through the record format") {
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const Corpus c = normalized(testutil::small_random_corpus(seed));
    const Corpus back = parse(conll_string(c));
    CHECK(back == c);
    // and the other direction: records → token format → records
    std::istringstream rec(corpus_records_string(back));
    const Corpus again = parse_corpus_records(rec);
    CHECK(again == c);
  }
}

TEST_CASE("headers: topic and date are optional, id and views are not") {
  const Corpus c = parse(
      "# post_id = only\n"
      "# views = A1\n"
      "1\ta\tO\n"
      "\n");
  CHECK(c.posts[0].topic.empty());
  CHECK(c.posts[0].date.empty());

  CHECK_THROWS_MATCHES(parse("# views = A1\n1\ta\tO\n\n"), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("post_id")));
  CHECK_THROWS_MATCHES(parse("# post_id = x\n1\ta\tO\n\n"), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("views")));
  CHECK_THROWS_AS(parse("# post_id = x\n# views = A1\n# wat = 1\n1\ta\tO\n\n"),
                  FormatError);
}

TEST_CASE("token lines are validated") {
  const std::string head = "# post_id = x\n# views = A1\n";
  // out-of-order index
  CHECK_THROWS_MATCHES(parse(head + "1\ta\tO\n3\tb\tO\n\n"), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 4")));
  // non-numeric index
  CHECK_THROWS_AS(parse(head + "one\ta\tO\n\n"), FormatError);
  // empty token text
  CHECK_THROWS_AS(parse(head + "1\t\tO\n\n"), FormatError);
  // a bare tag next to O
  CHECK_THROWS_AS(parse(head + "1\ta\tO|B-LL\n\n"), FormatError);
  // malformed tag
  CHECK_THROWS_AS(parse(head + "1\ta\tB_LL\n\n"), FormatError);
  CHECK_THROWS_AS(parse(head + "1\ta\tB-\n\n"), FormatError);
  // duplicate tag for one label on one token
  CHECK_THROWS_MATCHES(parse(head + "1\ta\tB-LL|B-LL\n\n"), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("duplicate")));
  // token line before any headers
  CHECK_THROWS_AS(parse("1\ta\tO\n\n"), FormatError);
  // header after token lines
  CHECK_THROWS_AS(parse(head + "1\ta\tO\n# topic = t\n\n"), FormatError);
}

TEST_CASE("orphan continuation tags are errors strictly, repairs leniently") {
  const std::string text =
      "# post_id = x\n"
      "# views = A1\n"
      "1\ta\tO\n"
      "2\tb\tI-LL\n"
      "\n";
  CHECK_THROWS_MATCHES(parse(text), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("BAD_TAG_SEQUENCE")));

  std::vector<Violation> violations;
  const Corpus c = parse(text, &violations);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == Violation::Kind::BAD_TAG_SEQUENCE);
  // repaired as a fresh span start
  CHECK(c.posts[0].views[0].spans ==
        std::vector<FallacySpan>{sp(1, 2, Label::LL)});
  CHECK(validate(c).empty());
}

TEST_CASE("restarted same-label span merges leniently") {
  const std::string text =
      "# post_id = x\n"
      "# views = A1\n"
      "1\ta\tB-LL\n"
      "2\tb\tB-LL\n"
      "\n";
  CHECK_THROWS_MATCHES(parse(text), FormatError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("SAME_LABEL_OVERLAP")));

  std::vector<Violation> violations;
  const Corpus c = parse(text, &violations);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == Violation::Kind::SAME_LABEL_OVERLAP);
  CHECK(c.posts[0].views[0].spans ==
        std::vector<FallacySpan>{sp(0, 2, Label::LL)});
  CHECK(validate(c).empty());
}

TEST_CASE("column mismatches and unknown tag labels repair leniently") {
  const std::string text =
      "# post_id = x\n"
      "# views = A1 A2\n"
      "1\ta\tB-LL\n"          // missing the A2 column
      "2\tb\tO\tB-XX\tO\n"    // an extra column and an unknown label
      "\n";
  CHECK_THROWS_AS(parse(text), FormatError);

  std::vector<Violation> violations;
  const Corpus c = parse(text, &violations);
  REQUIRE(c.posts.size() == 1);
  REQUIRE(c.posts[0].views.size() == 2);
  CHECK(c.posts[0].views[0].spans ==
        std::vector<FallacySpan>{sp(0, 1, Label::LL)});
  CHECK(c.posts[0].views[1].spans.empty());

  int mismatches = 0, unknown = 0;
  for (const Violation& v : violations) {
    mismatches += v.kind == Violation::Kind::VIEW_MISMATCH;
    unknown += v.kind == Violation::Kind::UNKNOWN_LABEL;
  }
  CHECK(mismatches == 2);
  CHECK(unknown == 1);
  CHECK(validate(c).empty());
}

TEST_CASE("multiple posts separated by blank lines") {
  const Corpus c = parse(
      "# post_id = x\n# views = A1\n1\ta\tO\n\n"
      "# post_id = y\n# views = A1\n1\ta\tB-NC\n\n");
  REQUIRE(c.posts.size() == 2);
  CHECK(c.posts[1].views[0].spans ==
        std::vector<FallacySpan>{sp(0, 1, Label::NC)});

  // a missing trailing blank line is tolerated
  const Corpus d = parse("# post_id = x\n# views = A1\n1\ta\tO\n");
  REQUIRE(d.posts.size() == 1);
}

TEST_CASE("duplicate post ids across blocks repair leniently") {
  const std::string text =
      "# post_id = x\n# views = A1\n1\ta\tO\n\n"
      "# post_id = x\n# views = A1\n1\ta\tB-LL\n\n";
  CHECK_THROWS_AS(parse(text), FormatError);
  std::vector<Violation> violations;
  const Corpus c = parse(text, &violations);
  REQUIRE(c.posts.size() == 1);
  CHECK(c.posts[0].views[0].spans.empty());
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == Violation::Kind::DUPLICATE_POST_ID);
}
