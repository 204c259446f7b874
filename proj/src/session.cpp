#include "blequiz/session.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "blequiz/scan_log.hpp"
#include "json.hpp"

namespace blequiz {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
constexpr std::string_view kSessionTag = "blequiz";
constexpr int kSessionVersion = 1;
}  // namespace

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Move: return "move";
    case EventKind::Confirm: return "confirm";
    case EventKind::Advance: return "advance";
    case EventKind::Reset: return "reset";
  }
  return "confirm";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  if (name == "move") return EventKind::Move;
  if (name == "confirm") return EventKind::Confirm;
  if (name == "advance") return EventKind::Advance;
  if (name == "reset") return EventKind::Reset;
  return std::nullopt;
}

std::string to_ndjson_line(const SessionEvent& e) {
  ordered_json j;
  j["ts_ms"] = e.ts_ms;
  j["event"] = event_name(e.kind);
  if (e.kind == EventKind::Move) {
    j["x"] = e.target.x;
    j["y"] = e.target.y;
  }
  return j.dump();
}

SessionWriter::SessionWriter(std::ostream& sink, const SessionHeader& header) : sink_(sink) {
  ordered_json j;
  j["session"] = kSessionTag;
  j["version"] = kSessionVersion;
  j["seed"] = header.seed;
  j["tick_rate_hz"] = header.tick_rate_hz;
  j["mode"] = header.mode;
  line(j.dump());
  flush();
}

void SessionWriter::sample(const RssiSample& s) { line(to_ndjson_line(s)); }

void SessionWriter::event(const SessionEvent& e) { line(to_ndjson_line(e)); }

void SessionWriter::flush() {
  sink_.flush();
  if (!sink_) throw IoError("session log flush failed");
}

void SessionWriter::line(const std::string& text) {
  sink_ << text << '\n';
  if (!sink_) throw IoError("session log write failed");
}

namespace {

SessionHeader parse_header(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, std::string("invalid session header: ") + e.what());
  }
  if (!j.is_object() || j.value("session", "") != kSessionTag) {
    throw ParseError(1, "not a session log (missing \"session\" header)");
  }
  if (j.value("version", 0) != kSessionVersion) throw ParseError(1, "unsupported session version");
  SessionHeader h;
  try {
    h.seed = j.at("seed").get<std::uint64_t>();
    h.tick_rate_hz = j.at("tick_rate_hz").get<int>();
    h.mode = j.value("mode", "sim");
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("bad session header: ") + e.what());
  }
  if (h.tick_rate_hz < 1 || h.tick_rate_hz > 100) throw ParseError(1, "tick_rate_hz out of range");
  return h;
}

SessionEvent parse_event(const json& j, std::size_t line_no) {
  SessionEvent e;
  const auto& ts = j.at("ts_ms");
  if (!ts.is_number_integer() || ts.get<std::int64_t>() < 0) {
    throw ParseError(line_no, "ts_ms must be a non-negative integer");
  }
  e.ts_ms = ts.get<std::int64_t>();
  const auto& name = j.at("event");
  auto kind = name.is_string() ? parse_event_kind(name.get<std::string>()) : std::nullopt;
  if (!kind) throw ParseError(line_no, "unknown event kind");
  e.kind = *kind;
  if (e.kind == EventKind::Move) {
    auto x = j.find("x");
    auto y = j.find("y");
    if (x == j.end() || y == j.end() || !x->is_number() || !y->is_number()) {
      throw ParseError(line_no, "move event needs numeric x and y");
    }
    e.target = {x->get<double>(), y->get<double>()};
    if (!std::isfinite(e.target.x) || !std::isfinite(e.target.y)) {
      throw ParseError(line_no, "move target must be finite");
    }
  }
  return e;
}

}  // namespace

Session read_session(std::istream& source) {
  Session session;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      if (line_no != 1) throw ParseError(line_no, "session header must be the first line");
      session.header = parse_header(line);
      have_header = true;
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
    if (j.contains("event")) {
      try {
        session.entries.emplace_back(parse_event(j, line_no));
      } catch (const json::exception& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      session.entries.emplace_back(parse_scan_line(line, line_no));
    }
  }
  if (source.bad()) throw IoError("session log read failed");
  if (!have_header) throw ParseError(1, "empty session log (missing header)");
  return session;
}

}  // namespace blequiz
