// blequiz: serve the game, replay recorded sessions, or generate scan logs.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blequiz/config.hpp"
#include "blequiz/engine.hpp"
#include "blequiz/scan_log.hpp"
#include "blequiz/server.hpp"

namespace {

using namespace blequiz;

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw CLI::ValidationError("--path", "bad " + std::string(what) + " \"" + std::string(text) + "\"");
  }
  return v;
}

/// "x,y;x,y@t;..." in meters; @t pins the arrival time in ms, otherwise the
/// player walks from the previous waypoint at the configured speed.
PlayerPath parse_waypoints(std::string_view text, double speed_mps) {
  PlayerPath path;
  std::optional<PlayerPath::Keyframe> prev;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;

    std::optional<TimestampMs> at;
    if (auto a = item.find('@'); a != std::string_view::npos) {
      at = static_cast<TimestampMs>(parse_number(item.substr(a + 1), "time"));
      item = item.substr(0, a);
    }
    const auto comma = item.find(',');
    if (comma == std::string_view::npos) throw CLI::ValidationError("--path", "expected x,y pairs");
    const Point2 p{parse_number(item.substr(0, comma), "x"), parse_number(item.substr(comma + 1), "y")};

    TimestampMs ts = 0;
    if (at) {
      ts = *at;
    } else if (prev) {
      ts = prev->ts_ms + static_cast<TimestampMs>(std::llround(distance(prev->position, p) / speed_mps * 1000.0));
    }
    path.add(ts, p);
    prev = PlayerPath::Keyframe{ts, p};
  }
  if (path.empty()) throw CLI::ValidationError("--path", "no waypoints given");
  return path;
}

AppConfig config_or_default(const std::string& path) {
  return path.empty() ? AppConfig{} : load_config(path);
}

int run_serve(const std::string& config_path, const std::optional<std::string>& mode,
              const std::optional<std::string>& replay_file, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& listen, const std::optional<std::string>& questions,
              const std::optional<std::string>& record_path) {
  AppConfig cfg = config_or_default(config_path);
  if (mode) {
    auto m = parse_mode(*mode);
    if (!m) throw ConfigError("--mode: expected sim, replay or live");
    cfg.mode = *m;
  }
  if (replay_file) cfg.replay_path = *replay_file;
  if (seed) cfg.seed = *seed;
  if (listen) cfg.listen = parse_listen_address(*listen);
  if (questions) cfg.questions_path = *questions;
  cfg.validate();

  QuestionBank bank = load_configured_bank(cfg);

  ServerOptions options;
  options.handle_signals = true;
  std::ofstream record;
  if (record_path) {
    record.open(*record_path, std::ios::binary | std::ios::trunc);
    if (!record) throw IoError("cannot open record file " + *record_path);
    options.record = &record;
  }
  if (cfg.mode == Mode::Replay) {
    std::ifstream in(cfg.replay_path, std::ios::binary);
    if (!in) throw IoError("cannot open replay file " + cfg.replay_path);
    options.replay = read_session(in);
    cfg = replay_config(cfg, *options.replay, seed);
  }

  GameServer server(cfg, std::move(bank), std::move(options));
  server.start();
  server.wait();
  return 0;
}

int run_replay(const std::string& config_path, const std::string& replay_file,
               const std::optional<std::string>& assert_phase, const std::optional<std::uint64_t>& seed,
               bool print_snapshots) {
  AppConfig cfg = config_or_default(config_path);
  std::ifstream in(replay_file, std::ios::binary);
  if (!in) throw IoError("cannot open replay file " + replay_file);
  const Session session = read_session(in);
  cfg.replay_path = replay_file;
  cfg = replay_config(cfg, session, seed);

  std::optional<Phase> expected;
  if (assert_phase) {
    expected = parse_phase(*assert_phase);
    if (!expected) throw ConfigError("--assert-final-phase: unknown phase \"" + *assert_phase + "\"");
  }

  Engine engine(cfg, load_configured_bank(cfg));
  SessionReplayer replayer(session, engine);
  while (!replayer.done()) {
    const auto& snap = replayer.step();
    if (print_snapshots) std::cout << to_json(snap) << '\n';
  }
  const Phase final_phase = engine.latest().phase;
  std::cerr << "final phase: " << phase_name(final_phase) << " after " << engine.latest().seq
            << " ticks, score " << engine.latest().score_level << "\n";
  if (expected && *expected != final_phase) {
    std::cerr << "expected final phase " << phase_name(*expected) << "\n";
    return 1;
  }
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& waypoints,
                 const std::string& out_path, const std::optional<std::uint64_t>& seed,
                 TimestampMs dwell_ms) {
  AppConfig cfg = config_or_default(config_path);
  if (seed) cfg.seed = *seed;
  const PlayerPath path = parse_waypoints(waypoints, cfg.walking_speed_mps);
  for (const auto& k : path.keyframes()) {
    if (!cfg.room.contains(k.position)) {
      throw CLI::ValidationError("--path", "waypoint outside the room");
    }
  }

  BeaconSimulator sim(cfg.room, cfg.seed);
  const auto samples = sim.advance(path.end_ms() + dwell_ms, path);

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_path);
  write_scan_log(samples, out);
  std::cerr << "wrote " << samples.size() << " samples to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BLE indoor-positioning quiz: game server and tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;

  auto* serve = app.add_subcommand("serve", "Run the game server");
  std::optional<std::string> mode, replay_file, listen, questions, record;
  serve->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  serve->add_option("--mode", mode, "sim, replay or live");
  serve->add_option("--replay-file", replay_file, "Session log to play back in replay mode");
  serve->add_option("--seed", seed, "Random seed");
  serve->add_option("--listen", listen, "Listen address host:port");
  serve->add_option("--questions", questions, "Question bank JSON");
  serve->add_option("--record", record, "Write a session log here");

  auto* replay = app.add_subcommand("replay", "Replay a session log headlessly");
  std::string replay_path;
  std::optional<std::string> assert_phase;
  bool print_snapshots = false;
  replay->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  replay->add_option("--replay-file", replay_path, "Session log")->required()->check(CLI::ExistingFile);
  replay->add_option("--assert-final-phase", assert_phase, "Exit 1 unless the game ends in this phase");
  replay->add_option("--seed", seed, "Override the recorded seed");
  replay->add_flag("--print-snapshots", print_snapshots, "Write every snapshot to stdout");

  auto* simulate = app.add_subcommand("simulate", "Generate a scan log for a scripted walk");
  std::string waypoints, out_path;
  TimestampMs dwell_ms = 1000;
  simulate->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--path", waypoints, "Waypoints in meters: x,y[@ms];x,y[@ms];...")->required();
  simulate->add_option("--out", out_path, "Output scan log (NDJSON)")->required();
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--dwell-ms", dwell_ms, "Keep broadcasting this long after the last waypoint");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(config_path, mode, replay_file, seed, listen, questions, record);
    if (*replay) return run_replay(config_path, replay_path, assert_phase, seed, print_snapshots);
    if (*simulate) return run_simulate(config_path, waypoints, out_path, seed, dwell_ms);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
