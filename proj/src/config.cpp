#include "blequiz/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"

namespace blequiz {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Sim: return "sim";
    case Mode::Replay: return "replay";
    case Mode::Live: return "live";
  }
  return "sim";
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "sim") return Mode::Sim;
  if (name == "replay") return Mode::Replay;
  if (name == "live") return Mode::Live;
  return std::nullopt;
}

ListenAddress parse_listen_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ConfigError("listen: expected host:port, got \"" + std::string(text) + "\"");
  }
  ListenAddress addr;
  addr.host = std::string(text.substr(0, colon));
  const auto port_text = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value > 65535) {
    throw ConfigError("listen: invalid port \"" + std::string(port_text) + "\"");
  }
  addr.port = static_cast<unsigned short>(value);
  return addr;
}

std::string format_listen_address(const ListenAddress& addr) {
  return addr.host + ":" + std::to_string(addr.port);
}

TimestampMs AppConfig::tick_period_ms() const {
  return static_cast<TimestampMs>(std::llround(1000.0 / tick_rate_hz));
}

void AppConfig::validate() const {
  try {
    room.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("room: ") + e.what());
  }
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
  if (window_size < 1) throw ConfigError("window_size: must be >= 1");
  if (tick_rate_hz < 1 || tick_rate_hz > 100) throw ConfigError("tick_rate_hz: must be within [1, 100]");
  if (mode == Mode::Replay && replay_path.empty()) {
    throw ConfigError("replay_path: required when mode is \"replay\"");
  }
  if (feedback_auto_advance_ms < 0) throw ConfigError("feedback_auto_advance_ms: must be >= 0");
  if (!(walking_speed_mps > 0.0) || !std::isfinite(walking_speed_mps)) {
    throw ConfigError("walking_speed_mps: must be > 0");
  }
  if (live_source != "stdin" && live_source.rfind("tcp://", 0) != 0) {
    throw ConfigError("live_source: expected \"stdin\" or \"tcp://host:port\"");
  }
  if (live_source.rfind("tcp://", 0) == 0) {
    try {
      parse_listen_address(std::string_view(live_source).substr(6));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("live_source: ") + e.what());
    }
  }
}

namespace {

/// Walks one JSON object, tracking the field path for error messages and
/// which keys were consumed so leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where_self() + "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (!v->is_number_unsigned()) throw ConfigError(field(key) + ": expected a non-negative integer");
        out = v->get<Int>();
      } else {
        out = v->get<Int>();
      }
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key) + ": unknown field");
    }
  }

 private:
  std::string where_self() const { return path_.empty() ? "" : path_ + ": "; }

  const json& obj_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

std::string resolve_path(const std::string& p, const std::filesystem::path& base_dir) {
  if (p.empty() || base_dir.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (base_dir / path).lexically_normal().string();
}

void parse_room(const json& j, RoomModel& room) {
  ObjectReader r(j, "room");
  r.number("width", room.width);
  r.number("depth", room.depth);
  r.number("path_loss_exponent", room.propagation.path_loss_exponent);
  r.number("noise_sigma", room.propagation.noise_sigma);
  r.number("d_min", room.propagation.d_min);

  // Room-wide radio defaults, then per-beacon overrides.
  double tx = room.beacons[0].tx_power_1m;
  std::int64_t interval = room.beacons[0].advertise_interval_ms;
  r.number("tx_power_1m", tx);
  r.integer("advertise_interval_ms", interval);
  for (auto& b : room.beacons) {
    b.tx_power_1m = tx;
    b.advertise_interval_ms = interval;
  }

  if (const json* beacons = r.find("beacons")) {
    if (!beacons->is_array() || beacons->size() != kCornerCount) {
      throw ConfigError("room.beacons: expected an array of 4 beacons");
    }
    for (int k = 0; k < kCornerCount; ++k) {
      ObjectReader br((*beacons)[k], "room.beacons[" + std::to_string(k) + "]");
      BeaconSpec& b = room.beacons[k];
      int id = k;
      br.integer("id", id);
      if (id != k) throw ConfigError(br.field("id") + ": must equal the corner index " + std::to_string(k));
      br.string("uuid", b.uuid);
      br.number("tx_power_1m", b.tx_power_1m);
      br.integer("advertise_interval_ms", b.advertise_interval_ms);
      br.finish();
    }
  }

  if (const json* corners = r.find("corners")) {
    if (!corners->is_array() || corners->size() != kCornerCount) {
      throw ConfigError("room.corners: expected an array of 4 corner styles");
    }
    for (int k = 0; k < kCornerCount; ++k) {
      ObjectReader cr((*corners)[k], "room.corners[" + std::to_string(k) + "]");
      cr.string("color", room.corner_styles[k].color);
      cr.integer("number", room.corner_styles[k].number);
      cr.finish();
    }
  }
  r.finish();

  for (int k = 0; k < kCornerCount; ++k) room.beacons[k].position = room.corner(k);
}

void parse_policy(const json& j, SelectionPolicy& policy) {
  ObjectReader r(j, "policy");
  r.number("enter_threshold", policy.enter_threshold);
  r.number("exit_threshold", policy.exit_threshold);
  r.number("min_confidence", policy.min_confidence);
  r.number("centroid_exponent", policy.centroid_exponent);
  r.finish();
}

ordered_json room_json(const RoomModel& room) {
  ordered_json j;
  j["width"] = room.width;
  j["depth"] = room.depth;
  j["path_loss_exponent"] = room.propagation.path_loss_exponent;
  j["noise_sigma"] = room.propagation.noise_sigma;
  j["d_min"] = room.propagation.d_min;
  j["beacons"] = ordered_json::array();
  for (const auto& b : room.beacons) {
    j["beacons"].push_back({{"id", b.id},
                            {"uuid", b.uuid},
                            {"tx_power_1m", b.tx_power_1m},
                            {"advertise_interval_ms", b.advertise_interval_ms}});
  }
  j["corners"] = ordered_json::array();
  for (const auto& c : room.corner_styles) {
    j["corners"].push_back({{"color", c.color}, {"number", c.number}});
  }
  return j;
}

ordered_json policy_json(const SelectionPolicy& p) {
  return {{"enter_threshold", p.enter_threshold},
          {"exit_threshold", p.exit_threshold},
          {"min_confidence", p.min_confidence},
          {"centroid_exponent", p.centroid_exponent}};
}

}  // namespace

AppConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  AppConfig cfg;
  ObjectReader r(doc, "");
  if (const json* mode = r.find("mode")) {
    auto m = mode->is_string() ? parse_mode(mode->get<std::string>()) : std::nullopt;
    if (!m) throw ConfigError("mode: expected \"sim\", \"replay\" or \"live\"");
    cfg.mode = *m;
  }
  r.string("replay_path", cfg.replay_path);
  if (const json* listen = r.find("listen")) {
    if (!listen->is_string()) throw ConfigError("listen: expected a \"host:port\" string");
    cfg.listen = parse_listen_address(listen->get<std::string>());
  }
  r.integer("seed", cfg.seed);
  r.integer("tick_rate_hz", cfg.tick_rate_hz);
  r.integer("window_size", cfg.window_size);
  r.string("questions_path", cfg.questions_path);
  r.boolean("shuffle_answers", cfg.shuffle_answers);
  r.integer("feedback_auto_advance_ms", cfg.feedback_auto_advance_ms);
  r.number("walking_speed_mps", cfg.walking_speed_mps);
  r.string("ui_dir", cfg.ui_dir);
  r.string("live_source", cfg.live_source);
  if (const json* room = r.find("room")) parse_room(*room, cfg.room);
  if (const json* policy = r.find("policy")) parse_policy(*policy, cfg.policy);
  r.finish();

  cfg.replay_path = resolve_path(cfg.replay_path, base_dir);
  cfg.questions_path = resolve_path(cfg.questions_path, base_dir);
  cfg.ui_dir = resolve_path(cfg.ui_dir, base_dir);

  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config(text, std::filesystem::absolute(path).parent_path());
}

std::string dump_config(const AppConfig& c, int indent) {
  ordered_json j;
  j["mode"] = mode_name(c.mode);
  j["seed"] = c.seed;
  j["tick_rate_hz"] = c.tick_rate_hz;
  j["window_size"] = c.window_size;
  j["listen"] = format_listen_address(c.listen);
  j["replay_path"] = c.replay_path;
  j["questions_path"] = c.questions_path;
  j["shuffle_answers"] = c.shuffle_answers;
  j["feedback_auto_advance_ms"] = c.feedback_auto_advance_ms;
  j["walking_speed_mps"] = c.walking_speed_mps;
  j["ui_dir"] = c.ui_dir;
  j["live_source"] = c.live_source;
  j["room"] = room_json(c.room);
  j["policy"] = policy_json(c.policy);
  return j.dump(indent);
}

std::string sanitized_config(const AppConfig& c) {
  ordered_json j;
  j["mode"] = mode_name(c.mode);
  j["tick_rate_hz"] = c.tick_rate_hz;
  j["window_size"] = c.window_size;
  j["shuffle_answers"] = c.shuffle_answers;
  j["feedback_auto_advance_ms"] = c.feedback_auto_advance_ms;
  j["walking_speed_mps"] = c.walking_speed_mps;
  j["room"] = room_json(c.room);
  j["policy"] = policy_json(c.policy);
  return j.dump();
}

}  // namespace blequiz
