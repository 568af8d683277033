#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/violation.hpp"

namespace fallax {

using ordered_json = nlohmann::ordered_json;

namespace detail {

struct RawSpan {
  int start = 0;
  int end = 0;
  std::string label;
};

inline RawSpan read_raw_span(const ordered_json& j, const std::string& ctx) {
  if (!j.is_object()) throw FormatError(ctx + ": span must be a JSON object");
  RawSpan out;
  if (!j.contains("start") || !j.at("start").is_number_integer())
    throw FormatError(ctx + ": span needs an integer \"start\"");
  if (!j.contains("end") || !j.at("end").is_number_integer())
    throw FormatError(ctx + ": span needs an integer \"end\"");
  if (!j.contains("label") || !j.at("label").is_string())
    throw FormatError(ctx + ": span needs a string \"label\"");
  out.start = j.at("start").get<int>();
  out.end = j.at("end").get<int>();
  out.label = j.at("label").get<std::string>();
  return out;
}

inline std::vector<std::string> read_tokens(const ordered_json& j,
                                            const std::string& ctx) {
  if (!j.contains("tokens") || !j.at("tokens").is_array())
    throw FormatError(ctx + ": record needs a \"tokens\" array");
  std::vector<std::string> tokens;
  for (const auto& t : j.at("tokens")) {
    if (!t.is_string()) throw FormatError(ctx + ": tokens must be strings");
    const std::string tok = t.get<std::string>();
    if (tok.find_first_of("\t\n\r") != std::string::npos)
      throw FormatError(ctx + ": token contains a tab or newline");
    tokens.push_back(tok);
  }
  return tokens;
}

inline std::string view_list_repr(const std::vector<std::string>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += ids[i];
  }
  out += ']';
  return out;
}

}  // namespace detail

/// Parse the one-record-per-line corpus format. With `sink == nullptr`
/// (strict) the first structural violation raises a FormatError; with a sink,
/// violations are collected and the offending span or post is dropped so the
/// returned corpus is always valid. Malformed JSON or missing required keys
/// is a hard error in both modes.
inline Corpus parse_corpus_records(std::istream& in,
                                   std::vector<Violation>* sink = nullptr) {
  Corpus corpus;
  bool views_declared = false;
  std::map<std::string, int> seen_ids;  // id -> first line
  std::string line;
  int lineno = 0;

  auto report = [&](const std::string& post_id, Violation::Kind kind,
                    const std::string& msg) {
    if (!sink)
      throw FormatError("line " + std::to_string(lineno) + ": " +
                        std::string(violation_kind_name(kind)) + ": " + msg +
                        " (post \"" + post_id + "\")");
    sink->push_back(Violation{post_id, kind, msg});
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string ctx = "line " + std::to_string(lineno);

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(ctx + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw FormatError(ctx + ": record must be a JSON object");
    if (!j.contains("id") || !j.at("id").is_string())
      throw FormatError(ctx + ": record needs a string \"id\"");

    Post post;
    post.id = j.at("id").get<std::string>();
    if (auto it = seen_ids.find(post.id); it != seen_ids.end()) {
      report(post.id, Violation::Kind::DUPLICATE_POST_ID,
             "post id \"" + post.id + "\" already used on line " +
                 std::to_string(it->second));
      continue;  // lenient: keep the first occurrence
    }
    seen_ids[post.id] = lineno;

    if (j.contains("topic")) {
      if (!j.at("topic").is_string())
        throw FormatError(ctx + ": \"topic\" must be a string");
      post.topic = j.at("topic").get<std::string>();
    }
    if (j.contains("date")) {
      if (!j.at("date").is_string())
        throw FormatError(ctx + ": \"date\" must be a string");
      post.date = j.at("date").get<std::string>();
    }
    post.tokens = detail::read_tokens(j, ctx);
    if (post.tokens.empty()) {
      report(post.id, Violation::Kind::OUT_OF_RANGE, "post has no tokens");
      continue;  // lenient: a token-less post cannot be represented
    }

    if (!j.contains("views") || !j.at("views").is_object())
      throw FormatError(ctx + ": record needs a \"views\" object");

    std::vector<View> raw_views;
    for (const auto& [vid, arr] : j.at("views").items()) {
      if (!arr.is_array())
        throw FormatError(ctx + ": view \"" + vid + "\" must be an array");
      View view{vid, {}};
      int span_idx = -1;
      for (const auto& sj : arr) {
        ++span_idx;
        const std::string span_ctx =
            ctx + ", view \"" + vid + "\", span " + std::to_string(span_idx);
        const detail::RawSpan raw = detail::read_raw_span(sj, span_ctx);
        const auto label = parse_label(raw.label);
        if (!label) {
          report(post.id, Violation::Kind::UNKNOWN_LABEL,
                 "view " + vid + " span " + std::to_string(span_idx) +
                     " has unknown label \"" + raw.label + "\"");
          continue;
        }
        const FallacySpan span{raw.start, raw.end, *label};
        if (span.start >= span.end) {
          report(post.id, Violation::Kind::OUT_OF_RANGE,
                 "view " + vid + " span " + span_repr(span) +
                     " is empty or inverted");
          continue;
        }
        if (span.start < 0 || span.end > post.token_count()) {
          report(post.id, Violation::Kind::OUT_OF_RANGE,
                 "view " + vid + " span " + span_repr(span) +
                     " out of range for " + std::to_string(post.token_count()) +
                     "-token post");
          continue;
        }
        bool conflict = false;
        for (const FallacySpan& kept : view.spans) {
          if (same_label_conflict(kept, span)) {
            report(post.id, Violation::Kind::SAME_LABEL_OVERLAP,
                   "view " + vid + " spans " + span_repr(kept) + " and " +
                       span_repr(span) +
                       (spans_share_tokens(kept, span) ? " overlap" : " touch"));
            conflict = true;
            break;
          }
        }
        if (conflict) continue;
        view.spans.push_back(span);
      }
      raw_views.push_back(std::move(view));
    }

    if (!views_declared) {
      for (const View& v : raw_views) corpus.view_ids.push_back(v.annotator_id);
      views_declared = true;
    }

    std::vector<std::string> post_view_ids;
    for (const View& v : raw_views) post_view_ids.push_back(v.annotator_id);
    bool mismatch = post_view_ids.size() != corpus.view_ids.size();
    if (!mismatch)
      for (const std::string& vid : corpus.view_ids) {
        bool found = false;
        for (const std::string& pvid : post_view_ids)
          if (pvid == vid) found = true;
        if (!found) mismatch = true;
      }
    if (mismatch)
      report(post.id, Violation::Kind::VIEW_MISMATCH,
             "post views " + detail::view_list_repr(post_view_ids) +
                 " do not match declared views " +
                 detail::view_list_repr(corpus.view_ids));

    // align to declared views: missing become empty, extras are dropped
    for (const std::string& vid : corpus.view_ids) {
      bool found = false;
      for (View& v : raw_views)
        if (v.annotator_id == vid) {
          post.views.push_back(std::move(v));
          found = true;
          break;
        }
      if (!found) post.views.push_back(View{vid, {}});
    }
    corpus.posts.push_back(std::move(post));
  }
  return corpus;
}

/// Deterministic writer: one compact JSON object per line, keys in fixed
/// order, views in declared order, spans as stored.
inline void write_corpus_records(const Corpus& c, std::ostream& out) {
  for (const Post& p : c.posts) {
    ordered_json j;
    j["id"] = p.id;
    j["topic"] = p.topic;
    j["date"] = p.date;
    j["tokens"] = p.tokens;
    ordered_json views = ordered_json::object();
    for (const std::string& vid : c.view_ids) {
      ordered_json arr = ordered_json::array();
      if (const View* v = p.find_view(vid))
        for (const FallacySpan& s : v->spans) {
          ordered_json sj;
          sj["start"] = s.start;
          sj["end"] = s.end;
          sj["label"] = std::string(code(s.label));
          arr.push_back(std::move(sj));
        }
      views[vid] = std::move(arr);
    }
    j["views"] = std::move(views);
    out << j.dump() << '\n';
  }
}

inline std::string corpus_records_string(const Corpus& c) {
  std::ostringstream out;
  write_corpus_records(c, out);
  return out.str();
}

/// One prediction record. Exactly one payload form per record:
///   Views  — one span set per annotator view (paired evaluation),
///   Spans  — a single span set compared against every gold view,
///   Labels — a post-level label set.
struct PredictionPost {
  enum class Form : std::uint8_t { Views, Spans, Labels };
  std::string id;
  Form form = Form::Spans;
  std::vector<View> views;
  std::vector<FallacySpan> spans;
  LabelMask labels = 0;
};

struct PredictionSet {
  std::vector<PredictionPost> posts;
  std::vector<std::string> view_ids;  // views named by paired records, first-seen order

  const PredictionPost* find_post(const std::string& id) const {
    for (const PredictionPost& p : posts)
      if (p.id == id) return &p;
    return nullptr;
  }
};

/// Parse prediction records (strict; predictions come from tools, so any
/// structural problem is a hard error). Range checks against gold token
/// counts happen at evaluation time.
inline PredictionSet parse_predictions(std::istream& in) {
  PredictionSet set;
  std::map<std::string, int> seen_ids;
  std::string line;
  int lineno = 0;

  auto read_span_list = [](const ordered_json& arr, const std::string& ctx) {
    std::vector<FallacySpan> spans;
    int idx = -1;
    for (const auto& sj : arr) {
      ++idx;
      const std::string span_ctx = ctx + ", span " + std::to_string(idx);
      const detail::RawSpan raw = detail::read_raw_span(sj, span_ctx);
      const auto label = parse_label(raw.label);
      if (!label)
        throw FormatError(span_ctx + ": unknown label \"" + raw.label + "\"");
      if (raw.start < 0 || raw.start >= raw.end)
        throw FormatError(span_ctx + ": empty, inverted, or negative interval");
      spans.push_back(FallacySpan{raw.start, raw.end, *label});
    }
    return spans;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string ctx = "line " + std::to_string(lineno);

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(ctx + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw FormatError(ctx + ": record must be a JSON object");
    if (!j.contains("id") || !j.at("id").is_string())
      throw FormatError(ctx + ": record needs a string \"id\"");

    PredictionPost post;
    post.id = j.at("id").get<std::string>();
    if (auto it = seen_ids.find(post.id); it != seen_ids.end())
      throw FormatError(ctx + ": post id \"" + post.id +
                        "\" already used on line " + std::to_string(it->second));
    seen_ids[post.id] = lineno;

    const int forms = int(j.contains("views")) + int(j.contains("spans")) +
                      int(j.contains("labels"));
    if (forms != 1)
      throw FormatError(ctx +
                        ": record needs exactly one of \"views\", \"spans\", "
                        "\"labels\"");

    if (j.contains("views")) {
      if (!j.at("views").is_object())
        throw FormatError(ctx + ": \"views\" must be an object");
      post.form = PredictionPost::Form::Views;
      for (const auto& [vid, arr] : j.at("views").items()) {
        if (!arr.is_array())
          throw FormatError(ctx + ": view \"" + vid + "\" must be an array");
        post.views.push_back(
            View{vid, read_span_list(arr, ctx + ", view \"" + vid + "\"")});
        bool known = false;
        for (const std::string& known_vid : set.view_ids)
          if (known_vid == vid) known = true;
        if (!known) set.view_ids.push_back(vid);
      }
    } else if (j.contains("spans")) {
      if (!j.at("spans").is_array())
        throw FormatError(ctx + ": \"spans\" must be an array");
      post.form = PredictionPost::Form::Spans;
      post.spans = read_span_list(j.at("spans"), ctx);
    } else {
      if (!j.at("labels").is_array())
        throw FormatError(ctx + ": \"labels\" must be an array");
      post.form = PredictionPost::Form::Labels;
      for (const auto& lj : j.at("labels")) {
        if (!lj.is_string())
          throw FormatError(ctx + ": labels must be strings");
        const auto label = parse_label(lj.get<std::string>());
        if (!label)
          throw FormatError(ctx + ": unknown label \"" +
                            lj.get<std::string>() + "\"");
        post.labels |= label_bit(*label);
      }
    }
    set.posts.push_back(std::move(post));
  }
  return set;
}

}  // namespace fallax
