#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blequiz/config.hpp"
#include "blequiz/game.hpp"
#include "blequiz/localization.hpp"
#include "blequiz/pipeline.hpp"
#include "blequiz/propagation.hpp"
#include "blequiz/session.hpp"
#include "blequiz/snapshot.hpp"

namespace blequiz {

/// A player-control message from a game screen.
struct ClientCommand {
  EventKind kind = EventKind::Confirm;
  Point2 target{};  // normalized room coordinates, Move only

  friend bool operator==(const ClientCommand&, const ClientCommand&) = default;
};

/// Parses a client frame: {"type":"move","x":f,"y":f}, {"type":"confirm"},
/// {"type":"advance"} or {"type":"reset"}. On failure returns the reason.
std::variant<ClientCommand, std::string> parse_client_message(std::string_view text);

/// {"type":"error","reason":"..."}
std::string error_frame(std::string_view reason);

/// The deterministic core: pipeline, localization and game, advanced one
/// tick at a time. In sim mode it also owns the beacon simulator and the
/// walking player. Not thread-safe; a single owner drives it.
class Engine {
 public:
  Engine(AppConfig config, QuestionBank bank);

  /// Applies a player command at time `now`. Returns the rejection reason
  /// when the command is not legal in the current mode or phase.
  std::optional<std::string> handle(const ClientCommand& cmd, TimestampMs now);

  /// Feeds one externally sourced sample (live or replay modes).
  void ingest(const RssiSample& sample);

  /// Runs one loop iteration at `now` and returns the new snapshot.
  const StateSnapshot& tick(TimestampMs now);

  const StateSnapshot& latest() const { return snapshot_; }
  std::string latest_json() const { return to_json(snapshot_); }

  /// Samples and accepted events are mirrored into `writer` when set.
  void set_recorder(SessionWriter* writer) { recorder_ = writer; }

  const AppConfig& config() const { return config_; }
  const QuestionBank& bank() const { return bank_; }
  const GameState& game() const { return game_; }
  const LocalizationFrame& frame() const { return frame_; }
  const SignalPipeline& pipeline() const { return pipeline_; }
  TimestampMs last_tick() const { return last_tick_; }

  /// Simulated player position and walk target in meters (sim mode).
  Point2 player_position() const { return player_; }
  Point2 walk_target() const { return target_; }

 private:
  void walk_player(TimestampMs now);
  void update_game(TimestampMs now);

  AppConfig config_;
  QuestionBank bank_;
  SignalPipeline pipeline_;
  std::optional<BeaconSimulator> simulator_;
  Rng game_rng_;
  GameState game_;
  LocalizationFrame frame_;
  StateSnapshot snapshot_;
  std::uint64_t seq_ = 0;
  TimestampMs last_tick_ = 0;
  TimestampMs feedback_since_ = 0;
  Point2 player_;
  Point2 target_;
  SessionWriter* recorder_ = nullptr;
};

/// Drives an Engine from a recorded session: at tick t = k * period it
/// feeds every entry with ts <= t (in file order), then ticks.
class SessionReplayer {
 public:
  /// `engine` must be configured for replay mode and outlive this object.
  SessionReplayer(const Session& session, Engine& engine);

  bool done() const { return next_ >= session_.entries.size(); }
  TimestampMs next_tick_time() const { return (tick_index_ + 1) * period_; }
  const StateSnapshot& step();

 private:
  const Session& session_;
  Engine& engine_;
  TimestampMs period_;
  std::size_t next_ = 0;
  TimestampMs tick_index_ = 0;
};

/// Engine config for replaying `session`: mode replay, seed and tick rate
/// taken from the session header unless `seed_override` is given.
AppConfig replay_config(AppConfig base, const Session& session,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

/// Replays a whole session and returns every snapshot's JSON in order.
std::vector<std::string> replay_snapshots(const AppConfig& config, const QuestionBank& bank,
                                          const Session& session);

/// Loads the configured question bank, or the built-in one.
QuestionBank load_configured_bank(const AppConfig& config);

}  // namespace blequiz
