#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fallax/conll.hpp"
#include "fallax/corpus.hpp"
#include "fallax/records.hpp"
#include "fallax/violation.hpp"

namespace fallax {

/// Check every structural invariant of an in-memory corpus. Returns a
/// (post_id, kind, message)-sorted list; empty means valid. Unknown labels
/// cannot occur here (the label type is closed) — they surface during
/// parsing instead — but ROOT-labeled spans are flagged since ROOT is not
/// an annotatable label.
inline std::vector<Violation> validate(const Corpus& corpus) {
  std::vector<Violation> out;
  std::map<std::string, int> seen;
  for (const Post& post : corpus.posts) {
    if (++seen[post.id] == 2)
      out.push_back(Violation{post.id, Violation::Kind::DUPLICATE_POST_ID,
                              "post id \"" + post.id + "\" appears more than once"});

    if (post.tokens.empty())
      out.push_back(
          Violation{post.id, Violation::Kind::OUT_OF_RANGE, "post has no tokens"});

    // exactly the declared views, each exactly once
    bool mismatch = post.views.size() != corpus.view_ids.size();
    if (!mismatch)
      for (const std::string& vid : corpus.view_ids) {
        int count = 0;
        for (const View& v : post.views)
          if (v.annotator_id == vid) ++count;
        if (count != 1) mismatch = true;
      }
    if (mismatch) {
      std::string have = "[";
      for (std::size_t i = 0; i < post.views.size(); ++i)
        have += (i ? " " : "") + post.views[i].annotator_id;
      have += "]";
      std::string want = "[";
      for (std::size_t i = 0; i < corpus.view_ids.size(); ++i)
        want += (i ? " " : "") + corpus.view_ids[i];
      want += "]";
      out.push_back(Violation{post.id, Violation::Kind::VIEW_MISMATCH,
                              "post carries views " + have +
                                  " but corpus declares " + want});
    }

    for (const View& view : post.views) {
      for (const FallacySpan& s : view.spans) {
        if (s.label == Label::ROOT)
          out.push_back(Violation{post.id, Violation::Kind::UNKNOWN_LABEL,
                                  "view " + view.annotator_id + " span " +
                                      span_repr(s) +
                                      ": ROOT is not an annotatable label"});
        if (s.start >= s.end)
          out.push_back(Violation{post.id, Violation::Kind::OUT_OF_RANGE,
                                  "view " + view.annotator_id + " span " +
                                      span_repr(s) + " is empty or inverted"});
        else if (s.start < 0 || s.end > post.token_count())
          out.push_back(Violation{
              post.id, Violation::Kind::OUT_OF_RANGE,
              "view " + view.annotator_id + " span " + span_repr(s) +
                  " out of range for " + std::to_string(post.token_count()) +
                  "-token post"});
      }
      for (std::size_t i = 0; i < view.spans.size(); ++i)
        for (std::size_t j = i + 1; j < view.spans.size(); ++j)
          if (same_label_conflict(view.spans[i], view.spans[j]))
            out.push_back(Violation{
                post.id, Violation::Kind::SAME_LABEL_OVERLAP,
                "view " + view.annotator_id + " spans " +
                    span_repr(view.spans[i]) + " and " +
                    span_repr(view.spans[j]) +
                    (spans_share_tokens(view.spans[i], view.spans[j])
                         ? " overlap"
                         : " touch")});
    }
  }
  sort_violations(out);
  return out;
}

enum class FileFormat { Records, Conll };

/// Sniff the on-disk format: record lines start with '{', token-format
/// files with a '#' header.
inline std::optional<FileFormat> detect_format(const std::string& content) {
  for (char c : content) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c == '{') return FileFormat::Records;
    if (c == '#') return FileFormat::Conll;
    return std::nullopt;
  }
  return std::nullopt;  // empty input: undetectable
}

struct ValidationResult {
  Corpus corpus;  // repaired: offending spans/posts dropped
  std::vector<Violation> violations;
  FileFormat format = FileFormat::Records;
};

/// Lenient end-to-end validation of a corpus file: autodetect the format,
/// parse collecting violations (repairing as documented in the parsers),
/// then validate the repaired corpus. Empty input counts as an empty
/// record-format corpus.
inline ValidationResult validate_stream(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  ValidationResult result;
  const auto format = detect_format(content);
  if (!format) {
    if (content.find_first_not_of(" \t\n\r") == std::string::npos) {
      result.format = FileFormat::Records;  // empty file, empty corpus
      return result;
    }
    throw FormatError(
        "cannot detect input format: expected record lines starting with '{' "
        "or token-format headers starting with '#'");
  }
  result.format = *format;

  std::istringstream stream(content);
  if (*format == FileFormat::Records)
    result.corpus = parse_corpus_records(stream, &result.violations);
  else
    result.corpus = parse_conll(stream, &result.violations);

  for (Violation& v : validate(result.corpus)) result.violations.push_back(v);
  sort_violations(result.violations);
  result.violations.erase(
      std::unique(result.violations.begin(), result.violations.end()),
      result.violations.end());
  return result;
}

}  // namespace fallax
