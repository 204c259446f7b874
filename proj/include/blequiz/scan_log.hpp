#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blequiz/propagation.hpp"

namespace blequiz {

// Scan-log NDJSON: one advertisement per line,
//   {"ts_ms":<int>,"beacon_id":<0-3>,"uuid":"<hex-uuid>","rssi_dbm":<float>}
// Doubles are written in shortest round-trip form so reading back is exact.

std::string to_ndjson_line(const RssiSample& sample);

/// Throws IoError if the sink goes bad.
void write_scan_log(std::span<const RssiSample> samples, std::ostream& sink);

/// Parses one line. `line_no` is 1-based and only used for error messages.
/// Throws ParseError on malformed JSON or schema violations.
RssiSample parse_scan_line(std::string_view line, std::size_t line_no);

/// Reads the whole stream in file order. Blank lines are skipped.
std::vector<RssiSample> read_scan_log(std::istream& source);

}  // namespace blequiz
