#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fallax {

/// Structural problem found in a corpus or an input file. Violations are
/// data, not exceptions: validation collects them; strict parsing raises
/// the first one as a FormatError instead.
struct Violation {
  enum class Kind : std::uint8_t {
    SAME_LABEL_OVERLAP,
    OUT_OF_RANGE,
    UNKNOWN_LABEL,
    VIEW_MISMATCH,
    BAD_TAG_SEQUENCE,
    DUPLICATE_POST_ID,
  };

  std::string post_id;
  Kind kind = Kind::OUT_OF_RANGE;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string_view violation_kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::SAME_LABEL_OVERLAP: return "SAME_LABEL_OVERLAP";
    case Violation::Kind::OUT_OF_RANGE: return "OUT_OF_RANGE";
    case Violation::Kind::UNKNOWN_LABEL: return "UNKNOWN_LABEL";
    case Violation::Kind::VIEW_MISMATCH: return "VIEW_MISMATCH";
    case Violation::Kind::BAD_TAG_SEQUENCE: return "BAD_TAG_SEQUENCE";
    case Violation::Kind::DUPLICATE_POST_ID: return "DUPLICATE_POST_ID";
  }
  return "UNKNOWN";
}

/// Deterministic report order: by post id, then kind, then message.
inline void sort_violations(std::vector<Violation>& v) {
  std::sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    if (a.post_id != b.post_id) return a.post_id < b.post_id;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.message < b.message;
  });
}

/// Raised by strict parsers and writers on malformed input.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fallax
