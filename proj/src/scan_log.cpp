#include "blequiz/scan_log.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace blequiz {

using ordered_json = nlohmann::ordered_json;

std::string to_ndjson_line(const RssiSample& s) {
  ordered_json j;
  j["ts_ms"] = s.ts_ms;
  j["beacon_id"] = s.beacon_id;
  j["uuid"] = s.uuid;
  j["rssi_dbm"] = s.rssi_dbm;
  return j.dump();
}

void write_scan_log(std::span<const RssiSample> samples, std::ostream& sink) {
  for (const auto& s : samples) {
    sink << to_ndjson_line(s) << '\n';
    if (!sink) throw IoError("scan log write failed");
  }
  sink.flush();
  if (!sink) throw IoError("scan log flush failed");
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line_no, std::string("missing field \"") + key + "\"");
  return *it;
}

}  // namespace

RssiSample parse_scan_line(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");

  RssiSample s;
  const auto& ts = require(j, "ts_ms", line_no);
  if (!ts.is_number_integer() || ts.get<std::int64_t>() < 0) {
    throw ParseError(line_no, "ts_ms must be a non-negative integer");
  }
  s.ts_ms = ts.get<std::int64_t>();

  const auto& id = require(j, "beacon_id", line_no);
  if (!id.is_number_integer() || !is_corner_index(id.get<int>())) {
    throw ParseError(line_no, "beacon_id must be an integer in 0-3");
  }
  s.beacon_id = id.get<int>();

  const auto& uuid = require(j, "uuid", line_no);
  if (!uuid.is_string() || !is_canonical_uuid(uuid.get_ref<const std::string&>())) {
    throw ParseError(line_no, "uuid must be a canonical 8-4-4-4-12 hex string");
  }
  s.uuid = uuid.get<std::string>();

  const auto& rssi = require(j, "rssi_dbm", line_no);
  if (!rssi.is_number() || !std::isfinite(rssi.get<double>())) {
    throw ParseError(line_no, "rssi_dbm must be a finite number");
  }
  s.rssi_dbm = rssi.get<double>();
  return s;
}

std::vector<RssiSample> read_scan_log(std::istream& source) {
  std::vector<RssiSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_scan_line(line, line_no));
  }
  if (source.bad()) throw IoError("scan log read failed");
  return out;
}

}  // namespace blequiz
