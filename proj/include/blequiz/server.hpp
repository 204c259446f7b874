#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "blequiz/config.hpp"
#include "blequiz/game.hpp"
#include "blequiz/session.hpp"

namespace blequiz {

struct ServerOptions {
  /// Session log sink for sim and live modes; not owned.
  std::ostream* record = nullptr;
  /// Recorded session to play back in replay mode.
  std::optional<Session> replay;
  /// Line source for live mode when live_source is "stdin"; not owned.
  std::istream* live_input = nullptr;
  /// Install SIGINT/SIGTERM handlers that stop the server.
  bool handle_signals = false;
  /// Pace ticks by the wall clock. When false the loop runs as fast as it
  /// can, which only makes sense in tests.
  bool realtime = true;
};

/// HTTP front door plus the /ws game endpoint around one Engine.
///
///   GET /         UI bundle from ui_dir, or a minimal built-in page
///   GET /healthz  {"status":"ok"}
///   GET /config   sanitized config
///   /ws           snapshot push, player-control messages in
///
/// The engine runs on its own loop thread. Network I/O runs on a second
/// thread; the two only exchange queued commands and immutable snapshot
/// frames.
class GameServer {
 public:
  GameServer(AppConfig config, QuestionBank bank, ServerOptions options = {});
  ~GameServer();

  GameServer(const GameServer&) = delete;
  GameServer& operator=(const GameServer&) = delete;

  /// Binds the listener and starts both threads. Throws std::system_error
  /// when the address cannot be bound.
  void start();

  /// Actual bound port (useful with port 0).
  unsigned short port() const;

  void request_stop();

  /// Blocks until request_stop() or a handled signal, then shuts down.
  void wait();

  /// Latest published snapshot JSON.
  std::string latest_snapshot() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace blequiz
