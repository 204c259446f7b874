#include <fstream>
#include <sstream>

#include "blequiz/scan_log.hpp"
#include "doctest.h"

using namespace blequiz;

TEST_CASE("empty list writes an empty log, empty log reads as no samples") {
  std::ostringstream out;
  write_scan_log({}, out);
  CHECK(out.str().empty());
  std::istringstream in("");
  CHECK(read_scan_log(in).empty());
}

TEST_CASE("line format") {
  const RssiSample s{1200, 2, default_beacon_uuid(2), -61.25};
  CHECK(to_ndjson_line(s) ==
        R"({"ts_ms":1200,"beacon_id":2,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000003","rssi_dbm":-61.25})");
}

TEST_CASE("single sample round trip") {
  const RssiSample s{7, 0, default_beacon_uuid(0), -70.123456789012345};
  std::ostringstream out;
  write_scan_log(std::span(&s, 1), out);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  std::istringstream in(text);
  const auto back = read_scan_log(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == s);
}

TEST_CASE("simulator output round trips in order") {
  BeaconSimulator sim(RoomModel::make(6.0, 6.0), 11);
  const auto samples = sim.advance(1000, PlayerPath::stationary({1.0, 1.0}));
  REQUIRE(samples.size() == 40);
  std::stringstream buf;
  write_scan_log(samples, buf);
  const auto back = read_scan_log(buf);
  CHECK(back == samples);
}

TEST_CASE("schema violations name the line") {
  const std::string good =
      R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":-60})";
  auto expect_error_at = [&](const std::string& bad, std::size_t line) {
    std::istringstream in(good + "\n" + good + "\n" + bad + "\n" + good + "\n");
    try {
      read_scan_log(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_error_at(R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001"})", 3);
  expect_error_at(R"({"ts_ms":1,"beacon_id":4,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":-60})", 3);
  expect_error_at(R"({"ts_ms":-5,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":-60})", 3);
  expect_error_at(R"({"ts_ms":1.5,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":-60})", 3);
  expect_error_at(R"({"ts_ms":1,"beacon_id":0,"uuid":"nope","rssi_dbm":-60})", 3);
  expect_error_at(R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":"loud"})", 3);
  expect_error_at(R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17)", 3);
  expect_error_at("[1,2,3]", 3);

  try {
    std::istringstream in(good + "\n" +
                          R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001"})");
    read_scan_log(in);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("rssi_dbm") != std::string::npos);
  }
}

TEST_CASE("blank lines and CRLF are tolerated") {
  const std::string good =
      R"({"ts_ms":1,"beacon_id":0,"uuid":"b1e0c0de-5a17-4e2d-9c3f-000000000001","rssi_dbm":-60})";
  std::istringstream in("\n" + good + "\r\n\n" + good + "\n");
  CHECK(read_scan_log(in).size() == 2);
}

TEST_CASE("failing sink raises IoError") {
  std::ofstream closed;  // never opened
  const RssiSample s{1, 0, default_beacon_uuid(0), -60.0};
  CHECK_THROWS_AS(write_scan_log(std::span(&s, 1), closed), IoError);
}
