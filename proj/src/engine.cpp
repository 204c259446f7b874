#include "blequiz/engine.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace blequiz {

using nlohmann::json;

std::variant<ClientCommand, std::string> parse_client_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    return std::string("malformed JSON");
  }
  if (!j.is_object()) return std::string("expected a JSON object");
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) return std::string("missing \"type\"");

  const auto name = type->get<std::string>();
  auto kind = parse_event_kind(name);
  if (!kind) return "unknown message type \"" + name + "\"";

  ClientCommand cmd{*kind, {}};
  if (cmd.kind == EventKind::Move) {
    auto x = j.find("x");
    auto y = j.find("y");
    if (x == j.end() || y == j.end() || !x->is_number() || !y->is_number()) {
      return std::string("move needs numeric \"x\" and \"y\"");
    }
    cmd.target = {x->get<double>(), y->get<double>()};
    if (!std::isfinite(cmd.target.x) || !std::isfinite(cmd.target.y)) {
      return std::string("move target must be finite");
    }
  }
  return cmd;
}

std::string error_frame(std::string_view reason) {
  nlohmann::ordered_json j;
  j["type"] = "error";
  j["reason"] = reason;
  return j.dump();
}

namespace {

constexpr std::uint64_t kGameSeedSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

Engine::Engine(AppConfig config, QuestionBank bank)
    : config_(std::move(config)),
      bank_(std::move(bank)),
      pipeline_(SignalPipeline::for_room(config_.room, config_.window_size)),
      game_rng_(config_.seed ^ kGameSeedSalt),
      frame_(LocalizationFrame::initial(0)),
      player_(config_.room.center()),
      target_(config_.room.center()) {
  config_.validate();
  if (bank_.questions.empty()) throw BankLoadError("question bank is empty");
  if (config_.mode == Mode::Sim) simulator_.emplace(config_.room, config_.seed);
  snapshot_ = make_snapshot(seq_, game_, bank_, frame_, pipeline_.signals(), config_.room);
}

std::optional<std::string> Engine::handle(const ClientCommand& cmd, TimestampMs now) {
  switch (cmd.kind) {
    case EventKind::Move: {
      if (config_.mode != Mode::Sim) {
        return "move is only accepted in sim mode (current mode: " +
               std::string(mode_name(config_.mode)) + ")";
      }
      const Point2 unit{std::clamp(cmd.target.x, 0.0, 1.0), std::clamp(cmd.target.y, 0.0, 1.0)};
      target_ = config_.room.from_unit(unit);
      if (recorder_) recorder_->event({now, EventKind::Move, unit});
      return std::nullopt;
    }
    case EventKind::Confirm:
      try {
        game_ = confirm(game_, bank_);
        feedback_since_ = now;
      } catch (const IllegalTransition& e) {
        return std::string(e.what());
      }
      break;
    case EventKind::Advance:
      try {
        game_ = advance(game_, bank_);
      } catch (const IllegalTransition& e) {
        return std::string(e.what());
      }
      break;
    case EventKind::Reset:
      game_ = reset_game(game_);
      pipeline_.reset();
      frame_.selection = {};
      break;
  }
  if (recorder_) recorder_->event({now, cmd.kind, {}});
  return std::nullopt;
}

void Engine::ingest(const RssiSample& sample) {
  if (recorder_) recorder_->sample(sample);
  pipeline_.push_sample(sample);
}

void Engine::walk_player(TimestampMs now) {
  const double dt = static_cast<double>(now - last_tick_) / 1000.0;
  const double step = config_.walking_speed_mps * dt;
  const double remaining = distance(player_, target_);
  Point2 next = target_;
  if (remaining > step) {
    const double f = step / remaining;
    next = {player_.x + f * (target_.x - player_.x), player_.y + f * (target_.y - player_.y)};
  }
  PlayerPath path;
  path.add(last_tick_, player_);
  path.add(now, next);
  for (const auto& s : simulator_->advance(now, path)) ingest(s);
  player_ = next;
}

void Engine::update_game(TimestampMs now) {
  switch (game_.phase) {
    case Phase::Idle: {
      // A round starts once the player stands clear of every corner with
      // all four filters warm.
      const bool warm = std::all_of(frame_.distances.begin(), frame_.distances.end(), [&](const auto& d) {
        return d.confidence >= config_.policy.min_confidence && d.confidence > 0.0;
      });
      if (warm && !frame_.selection.selected) {
        game_ = start_game(bank_, game_rng_, config_.shuffle_answers);
      }
      break;
    }
    case Phase::QuestionShown:
    case Phase::AnswerHighlighted:
      game_ = apply_selection(game_, frame_.selection);
      break;
    case Phase::Feedback:
      if (config_.feedback_auto_advance_ms > 0 && now - feedback_since_ >= config_.feedback_auto_advance_ms) {
        game_ = advance(game_, bank_);
      }
      break;
    case Phase::Won:
    case Phase::GameOver:
      break;
  }
}

const StateSnapshot& Engine::tick(TimestampMs now) {
  if (now < last_tick_) throw std::invalid_argument("engine tick went back in time");
  if (simulator_) walk_player(now);
  frame_ = blequiz::tick(pipeline_.signals(), config_.room, config_.policy, frame_, now);
  update_game(now);
  last_tick_ = now;
  snapshot_ = make_snapshot(++seq_, game_, bank_, frame_, pipeline_.signals(), config_.room);
  return snapshot_;
}

SessionReplayer::SessionReplayer(const Session& session, Engine& engine)
    : session_(session), engine_(engine), period_(engine.config().tick_period_ms()) {}

const StateSnapshot& SessionReplayer::step() {
  const TimestampMs now = ++tick_index_ * period_;
  while (next_ < session_.entries.size() && entry_ts(session_.entries[next_]) <= now) {
    const SessionEntry& entry = session_.entries[next_++];
    if (const auto* sample = std::get_if<RssiSample>(&entry)) {
      engine_.ingest(*sample);
    } else {
      const auto& ev = std::get<SessionEvent>(entry);
      // Walking is already captured by the recorded samples.
      if (ev.kind != EventKind::Move) engine_.handle({ev.kind, {}}, ev.ts_ms);
    }
  }
  return engine_.tick(now);
}

AppConfig replay_config(AppConfig base, const Session& session,
                        std::optional<std::uint64_t> seed_override) {
  base.mode = Mode::Replay;
  if (base.replay_path.empty()) base.replay_path = "<session>";
  base.seed = seed_override.value_or(session.header.seed);
  base.tick_rate_hz = session.header.tick_rate_hz;
  return base;
}

std::vector<std::string> replay_snapshots(const AppConfig& config, const QuestionBank& bank,
                                          const Session& session) {
  Engine engine(config, bank);
  SessionReplayer replayer(session, engine);
  std::vector<std::string> out;
  while (!replayer.done()) out.push_back(to_json(replayer.step()));
  return out;
}

QuestionBank load_configured_bank(const AppConfig& config) {
  if (config.questions_path.empty()) return builtin_question_bank();
  return load_question_bank(std::filesystem::path(config.questions_path));
}

}  // namespace blequiz
