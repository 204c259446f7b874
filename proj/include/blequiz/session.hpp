#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blequiz/propagation.hpp"

namespace blequiz {

// Session log NDJSON. The first line is a header,
//   {"session":"blequiz","version":1,"seed":N,"tick_rate_hz":10,"mode":"sim"}
// followed by scan-sample lines (scan-log format) and event lines,
//   {"ts_ms":N,"event":"confirm"|"advance"|"reset"}
//   {"ts_ms":N,"event":"move","x":f,"y":f}
// in the order the engine consumed them.

enum class EventKind { Move, Confirm, Advance, Reset };

std::string_view event_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SessionEvent {
  TimestampMs ts_ms = 0;
  EventKind kind = EventKind::Confirm;
  Point2 target{};  // normalized, Move only

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

using SessionEntry = std::variant<RssiSample, SessionEvent>;

inline TimestampMs entry_ts(const SessionEntry& e) {
  return std::visit([](const auto& v) { return v.ts_ms; }, e);
}

struct SessionHeader {
  std::uint64_t seed = 0;
  int tick_rate_hz = 10;
  std::string mode = "sim";

  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

struct Session {
  SessionHeader header;
  std::vector<SessionEntry> entries;
};

class SessionWriter {
 public:
  /// Writes the header immediately. Throws IoError on write failure.
  SessionWriter(std::ostream& sink, const SessionHeader& header);

  void sample(const RssiSample& s);
  void event(const SessionEvent& e);
  void flush();

 private:
  void line(const std::string& text);

  std::ostream& sink_;
};

std::string to_ndjson_line(const SessionEvent& e);

/// Throws ParseError naming the 1-based line on any malformed line,
/// including a missing or bad header.
Session read_session(std::istream& source);

}  // namespace blequiz
