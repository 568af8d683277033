#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fallax/corpus.hpp"
#include "fallax/label.hpp"
#include "fallax/violation.hpp"

namespace fallax {

/// Canonical token-format writer. Per post: `# post_id = ...`, `# views = ...`,
/// optional `# topic`/`# date`, then one line per token
/// (`<1-based index>\t<token>\t<one tag field per view>`), then a blank line.
/// A tag field is `O` or a `|`-joined stack of `B-<CODE>`/`I-<CODE>` tags,
/// one per covering span, in canonical span order.
inline void write_conll(const Corpus& c, std::ostream& out) {
  for (const Post& p : c.posts) {
    out << "# post_id = " << p.id << '\n';
    out << "# views =";
    for (const std::string& vid : c.view_ids) out << ' ' << vid;
    out << '\n';
    if (!p.topic.empty()) out << "# topic = " << p.topic << '\n';
    if (!p.date.empty()) out << "# date = " << p.date << '\n';
    for (int i = 0; i < p.token_count(); ++i) {
      out << (i + 1) << '\t' << p.tokens[static_cast<std::size_t>(i)];
      for (const std::string& vid : c.view_ids) {
        out << '\t';
        const View* v = p.find_view(vid);
        std::vector<FallacySpan> covering;
        if (v)
          for (const FallacySpan& s : v->spans)
            if (s.start <= i && i < s.end) covering.push_back(s);
        std::sort(covering.begin(), covering.end(), span_less);
        if (covering.empty()) {
          out << 'O';
        } else {
          for (std::size_t k = 0; k < covering.size(); ++k) {
            if (k) out << '|';
            out << (covering[k].start == i ? "B-" : "I-") << code(covering[k].label);
          }
        }
      }
      out << '\n';
    }
    out << '\n';
  }
}

inline std::string conll_string(const Corpus& c) {
  std::ostringstream out;
  write_conll(c, out);
  return out.str();
}

namespace detail {

// one decoded tag: (starts_here, label)
using TagStack = std::vector<std::pair<bool, Label>>;

inline bool parse_token_index(const std::string& field, int& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace detail

/// Parse the token format. Same strict/lenient contract as the record
/// parser: `sink == nullptr` raises a FormatError on the first violation,
/// a sink collects violations and repairs (orphan `I-` starts a new span,
/// a `B-` continuing an open same-label span merges into it, bad columns
/// are padded with `O`/truncated) so the result is always a valid corpus.
inline Corpus parse_conll(std::istream& in, std::vector<Violation>* sink = nullptr) {
  Corpus corpus;
  bool views_declared = false;
  std::map<std::string, int> seen_ids;  // id -> first line

  enum class State { Between, Headers, Tokens };
  State state = State::Between;

  // current post under construction
  Post post;
  bool have_post_id = false;
  std::vector<std::string> post_view_ids;
  bool have_views = false;
  std::vector<std::vector<detail::TagStack>> grid;  // [view][token]
  std::vector<int> token_lines;

  std::string line;
  int lineno = 0;

  auto report = [&](const std::string& post_id, Violation::Kind kind,
                    const std::string& msg, int at_line) {
    if (!sink)
      throw FormatError("line " + std::to_string(at_line) + ": " +
                        std::string(violation_kind_name(kind)) + ": " + msg +
                        " (post \"" + post_id + "\")");
    sink->push_back(Violation{post_id, kind, msg});
  };

  auto decode_view = [&](std::size_t view_idx) {
    const std::string& vid = post_view_ids[view_idx];
    std::vector<FallacySpan> spans;
    std::map<Label, int> open;  // label -> span start
    const auto& col = grid[view_idx];
    for (std::size_t i = 0; i < col.size(); ++i) {
      const int tok = static_cast<int>(i);
      // close spans whose label is absent from this token's stack
      for (auto it = open.begin(); it != open.end();) {
        bool present = false;
        for (const auto& [starts, label] : col[i])
          if (label == it->first) present = true;
        if (!present) {
          spans.push_back(FallacySpan{it->second, tok, it->first});
          it = open.erase(it);
        } else {
          ++it;
        }
      }
      for (const auto& [starts, label] : col[i]) {
        if (starts) {
          if (auto it = open.find(label); it != open.end()) {
            // B continuing an open span would create touching same-label
            // spans, which the view invariant forbids; merge instead.
            report(post.id, Violation::Kind::SAME_LABEL_OVERLAP,
                   "view " + vid + " token " + std::to_string(tok + 1) + ": B-" +
                       std::string(code(label)) +
                       " immediately follows an open " +
                       std::string(code(label)) + " span; merged",
                   token_lines[i]);
          } else {
            open[label] = tok;
          }
        } else if (open.find(label) == open.end()) {
          report(post.id, Violation::Kind::BAD_TAG_SEQUENCE,
                 "view " + vid + " token " + std::to_string(tok + 1) + ": I-" +
                     std::string(code(label)) + " not preceded by B-" +
                     std::string(code(label)) + " or I-" +
                     std::string(code(label)) + "; treated as B-" +
                     std::string(code(label)),
                 token_lines[i]);
          open[label] = tok;  // repair: start a span here
        }
      }
    }
    for (const auto& [label, start] : open)
      spans.push_back(FallacySpan{start, static_cast<int>(col.size()), label});
    normalize_spans(spans);
    return spans;
  };

  auto finalize_post = [&](int at_line) {
    if (!have_post_id) return;  // nothing accumulated
    bool drop = false;
    if (auto it = seen_ids.find(post.id); it != seen_ids.end()) {
      report(post.id, Violation::Kind::DUPLICATE_POST_ID,
             "post id \"" + post.id + "\" already used on line " +
                 std::to_string(it->second),
             at_line);
      drop = true;
    } else {
      seen_ids[post.id] = at_line;
    }
    if (!drop && post.tokens.empty()) {
      report(post.id, Violation::Kind::OUT_OF_RANGE, "post has no tokens",
             at_line);
      drop = true;
    }
    if (!drop) {
      std::vector<View> raw_views;
      for (std::size_t v = 0; v < post_view_ids.size(); ++v)
        raw_views.push_back(View{post_view_ids[v], decode_view(v)});
      if (!views_declared) {
        corpus.view_ids = post_view_ids;
        views_declared = true;
      }
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
               "post declares views [" +
                   [&] {
                     std::string s;
                     for (std::size_t i = 0; i < post_view_ids.size(); ++i)
                       s += (i ? " " : "") + post_view_ids[i];
                     return s;
                   }() +
                   "] but corpus declares [" +
                   [&] {
                     std::string s;
                     for (std::size_t i = 0; i < corpus.view_ids.size(); ++i)
                       s += (i ? " " : "") + corpus.view_ids[i];
                     return s;
                   }() +
                   "]",
               at_line);
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
    post = Post{};
    have_post_id = false;
    have_views = false;
    post_view_ids.clear();
    grid.clear();
    token_lines.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string ctx = "line " + std::to_string(lineno);

    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (state != State::Between) finalize_post(lineno);
      state = State::Between;
      continue;
    }

    if (line[0] == '#') {
      if (state == State::Tokens)
        throw FormatError(ctx + ": header line after token lines");
      if (state == State::Between) state = State::Headers;
      std::string body = line.substr(1);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        throw FormatError(ctx + ": header line needs `# key = value`");
      auto trim = [](std::string s) {
        std::size_t b = 0, e = s.size();
        while (b < e && s[b] == ' ') ++b;
        while (e > b && s[e - 1] == ' ') --e;
        return s.substr(b, e - b);
      };
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key == "post_id") {
        post.id = value;
        have_post_id = true;
      } else if (key == "views") {
        post_view_ids.clear();
        std::istringstream vs(value);
        std::string vid;
        while (vs >> vid) post_view_ids.push_back(vid);
        have_views = true;
      } else if (key == "topic") {
        post.topic = value;
      } else if (key == "date") {
        post.date = value;
      } else {
        throw FormatError(ctx + ": unknown header key \"" + key + "\"");
      }
      continue;
    }

    // token line
    if (state == State::Between)
      throw FormatError(ctx + ": token line outside a post (missing headers)");
    if (state == State::Headers) {
      if (!have_post_id)
        throw FormatError(ctx + ": token line before `# post_id` header");
      if (!have_views)
        throw FormatError(ctx + ": token line before `# views` header");
      grid.assign(post_view_ids.size(), {});
      state = State::Tokens;
    }

    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() < 2)
      throw FormatError(ctx + ": token line needs index and token columns");
    int idx = 0;
    if (!detail::parse_token_index(fields[0], idx))
      throw FormatError(ctx + ": bad token index \"" + fields[0] + "\"");
    if (idx != static_cast<int>(post.tokens.size()) + 1)
      throw FormatError(ctx + ": token index " + std::to_string(idx) +
                        " out of order (expected " +
                        std::to_string(post.tokens.size() + 1) + ")");
    if (fields[1].empty())
      throw FormatError(ctx + ": empty token");
    post.tokens.push_back(fields[1]);
    token_lines.push_back(lineno);

    const std::size_t expected = 2 + post_view_ids.size();
    if (fields.size() != expected)
      report(post.id, Violation::Kind::VIEW_MISMATCH,
             "token line " + std::to_string(idx) + " has " +
                 std::to_string(fields.size() - 2) + " tag columns, expected " +
                 std::to_string(post_view_ids.size()),
             lineno);

    for (std::size_t v = 0; v < post_view_ids.size(); ++v) {
      detail::TagStack stack;
      if (2 + v < fields.size()) {
        const std::string& field = fields[2 + v];
        if (field != "O") {
          std::vector<std::string> parts;
          std::size_t start = 0;
          while (true) {
            const std::size_t bar = field.find('|', start);
            if (bar == std::string::npos) {
              parts.push_back(field.substr(start));
              break;
            }
            parts.push_back(field.substr(start, bar - start));
            start = bar + 1;
          }
          for (const std::string& part : parts) {
            if (part == "O")
              throw FormatError(ctx + ": tag field mixes O with span tags");
            if (part.size() < 3 || (part[0] != 'B' && part[0] != 'I') ||
                part[1] != '-')
              throw FormatError(ctx + ": malformed tag \"" + part + "\"");
            const auto label = parse_label(part.substr(2));
            if (!label) {
              report(post.id, Violation::Kind::UNKNOWN_LABEL,
                     "view " + post_view_ids[v] + " token " +
                         std::to_string(idx) + " has unknown tag label \"" +
                         part.substr(2) + "\"",
                     lineno);
              continue;  // lenient: drop the tag
            }
            for (const auto& [starts, prev] : stack)
              if (prev == *label)
                throw FormatError(ctx + ": duplicate tag for label " +
                                  std::string(code(*label)) + " on one token");
            stack.emplace_back(part[0] == 'B', *label);
          }
        }
      }
      grid[v].push_back(std::move(stack));
    }
  }
  if (state != State::Between) finalize_post(lineno);
  return corpus;
}

}  // namespace fallax
