#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "blequiz/localization.hpp"
#include "blequiz/pipeline.hpp"
#include "blequiz/propagation.hpp"

namespace blequiz {

enum class Mode { Sim, Replay, Live };

std::string_view mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

/// Config errors carry the JSON path of the offending field, e.g.
/// "room.width: must be within [2, 50] m".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ListenAddress {
  std::string host = "127.0.0.1";
  unsigned short port = 8080;

  friend bool operator==(const ListenAddress&, const ListenAddress&) = default;
};

/// "host:port", port may be 0 for an ephemeral port.
ListenAddress parse_listen_address(std::string_view text);
std::string format_listen_address(const ListenAddress& addr);

struct AppConfig {
  RoomModel room = RoomModel::make(6.0, 6.0);
  SelectionPolicy policy;
  std::size_t window_size = kDefaultWindowSize;
  Mode mode = Mode::Sim;
  std::string replay_path;
  ListenAddress listen;
  std::uint64_t seed = 1;
  int tick_rate_hz = 10;
  std::string questions_path;  // empty: built-in bank
  bool shuffle_answers = true;
  std::int64_t feedback_auto_advance_ms = 3000;  // 0 disables
  double walking_speed_mps = 1.0;
  std::string ui_dir;              // empty: built-in placeholder page
  std::string live_source = "stdin";  // "stdin" or "tcp://host:port"

  TimestampMs tick_period_ms() const;

  /// Throws ConfigError for the first violated invariant.
  void validate() const;

  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

/// Parses a config document. Missing fields take their defaults; unknown
/// fields are rejected. Relative paths resolve against `base_dir`.
AppConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);

/// Full config as JSON; parse_config(dump_config(c)) == c.
std::string dump_config(const AppConfig& config, int indent = 2);

/// What `GET /config` serves: no filesystem paths.
std::string sanitized_config(const AppConfig& config);

}  // namespace blequiz
