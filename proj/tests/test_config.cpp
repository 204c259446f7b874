#include <fstream>

#include "blequiz/config.hpp"
#include "blequiz/engine.hpp"
#include "doctest.h"

using namespace blequiz;

namespace {

std::string error_of(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty object gives the defaults") {
  const AppConfig c = parse_config("{}");
  CHECK(c == AppConfig{});
  CHECK(c.room.width == 6.0);
  CHECK(c.room.depth == 6.0);
  CHECK(c.policy.enter_threshold == 1.5);
  CHECK(c.policy.exit_threshold == 2.2);
  CHECK(c.policy.min_confidence == 0.5);
  CHECK(c.policy.centroid_exponent == 2.0);
  CHECK(c.window_size == 10);
  CHECK(c.tick_rate_hz == 10);
  CHECK(c.tick_period_ms() == 100);
  CHECK(c.mode == Mode::Sim);
  CHECK(c.listen == ListenAddress{"127.0.0.1", 8080});
  CHECK(c.room.propagation.path_loss_exponent == 2.0);
  CHECK(c.room.propagation.noise_sigma == 2.0);
  CHECK(c.room.beacons[0].tx_power_1m == -59.0);
}

TEST_CASE("fields override defaults") {
  const AppConfig c = parse_config(R"({
    "mode": "live", "seed": 99, "tick_rate_hz": 20, "listen": "0.0.0.0:0",
    "room": {"width": 9, "depth": 4, "noise_sigma": 0, "tx_power_1m": -65,
             "corners": [{"color":"a","number":9},{"color":"b","number":8},
                         {"color":"c","number":7},{"color":"d","number":6}]},
    "policy": {"enter_threshold": 1.0, "exit_threshold": 3.0}
  })");
  CHECK(c.mode == Mode::Live);
  CHECK(c.seed == 99);
  CHECK(c.tick_period_ms() == 50);
  CHECK(c.listen.port == 0);
  CHECK(c.listen.host == "0.0.0.0");
  CHECK(c.room.corner(3) == Point2{9.0, 4.0});
  CHECK(c.room.beacons[2].tx_power_1m == -65.0);
  CHECK(c.room.propagation.noise_sigma == 0.0);
  CHECK(c.room.corner_styles[1].color == "b");
  CHECK(c.policy.exit_threshold == 3.0);
  CHECK(c.policy.min_confidence == 0.5);
}

TEST_CASE("errors name the field") {
  CHECK(error_of(R"({"mode":"replay"})").rfind("replay_path", 0) == 0);
  CHECK(error_of(R"({"colour":1})") == "colour: unknown field");
  CHECK(error_of(R"({"room":{"width":1}})").rfind("room", 0) == 0);
  CHECK(error_of(R"({"room":{"height":5}})") == "room.height: unknown field");
  CHECK(error_of(R"({"policy":{"enter_threshold":"x"}})") == "policy.enter_threshold: expected a number");
  CHECK(error_of(R"({"policy":{"enter_threshold":3}})").rfind("policy", 0) == 0);
  CHECK(error_of(R"({"tick_rate_hz":0})").rfind("tick_rate_hz", 0) == 0);
  CHECK(error_of(R"({"seed":-1})").rfind("seed", 0) == 0);
  CHECK(error_of(R"({"mode":"demo"})").rfind("mode", 0) == 0);
  CHECK(error_of(R"({"listen":"nowhere"})").rfind("listen", 0) == 0);
  CHECK(error_of(R"({"listen":"h:70000"})").rfind("listen", 0) == 0);
  CHECK(error_of(R"({"live_source":"serial"})").rfind("live_source", 0) == 0);
  CHECK(error_of(R"({"room":{"beacons":[{},{},{}]}})").rfind("room.beacons", 0) == 0);
  CHECK(error_of(R"({"room":{"beacons":[{"id":0},{"id":1},{"id":3},{"id":2}]}})") ==
        "room.beacons[2].id: must equal the corner index 2");
  CHECK(error_of("[1]").find("expected an object") != std::string::npos);
  CHECK(error_of("{").rfind("invalid JSON", 0) == 0);
}

TEST_CASE("relative paths resolve against the config directory") {
  const AppConfig c = parse_config(R"({"mode":"replay","replay_path":"s.ndjson","questions_path":"/abs/q.json"})",
                                   "/etc/blequiz");
  CHECK(c.replay_path == "/etc/blequiz/s.ndjson");
  CHECK(c.questions_path == "/abs/q.json");
}

TEST_CASE("dump and parse round trip") {
  AppConfig c;
  c.room = RoomModel::make(7.5, 3.25);
  c.room.beacons[1].advertise_interval_ms = 250;
  c.room.beacons[3].tx_power_1m = -61.5;
  c.policy.enter_threshold = 1.25;
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.mode = Mode::Live;
  c.live_source = "tcp://127.0.0.1:9000";
  c.questions_path = "/q.json";
  c.shuffle_answers = false;
  CHECK(parse_config(dump_config(c)) == c);
  CHECK(parse_config(dump_config(AppConfig{}, -1)) == AppConfig{});
}

TEST_CASE("sanitized config has no paths or seed") {
  AppConfig c;
  c.mode = Mode::Replay;
  c.replay_path = "/secret/session.ndjson";
  c.questions_path = "/secret/q.json";
  c.ui_dir = "/secret/ui";
  const std::string s = sanitized_config(c);
  CHECK(s.find("/secret") == std::string::npos);
  CHECK(s.find("seed") == std::string::npos);
  CHECK(s.find("\"replay\"") != std::string::npos);
  CHECK(s.find("enter_threshold") != std::string::npos);
}

TEST_CASE("load_config from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "blequiz_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "c.json");
    out << R"({"mode":"replay","replay_path":"rec.ndjson"})";
  }
  const AppConfig c = load_config(dir / "c.json");
  CHECK(std::filesystem::path(c.replay_path) == dir / "rec.ndjson");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped example config loads with its question bank") {
  const std::filesystem::path dir = BLEQUIZ_DATA_DIR;
  const AppConfig c = load_config(dir / "config.example.json");
  CHECK(c.seed == 42);
  CHECK(c.room == AppConfig{}.room);
  CHECK(c.policy == AppConfig{}.policy);
  CHECK(std::filesystem::path(c.questions_path) == dir / "questions.example.json");
  const QuestionBank bank = load_configured_bank(c);
  CHECK(bank.size() == 3);
  CHECK(bank.ladder.size() == 3);
}
