#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blequiz/game.hpp"
#include "blequiz/localization.hpp"
#include "blequiz/pipeline.hpp"

namespace blequiz {

struct AnswerView {
  int corner = 0;
  std::string color;
  int number = 0;
  std::string text;
};

struct BeaconReadout {
  int id = 0;
  std::optional<double> mean_rssi;  // absent until the first sample
  double distance = kDefaultMaxDistance;
  double confidence = 0.0;
};

/// Everything the game screen needs for one frame. Built from exactly one
/// (GameState, LocalizationFrame) pair.
struct StateSnapshot {
  std::uint64_t seq = 0;
  TimestampMs ts_ms = 0;
  Phase phase = Phase::Idle;
  std::optional<bool> feedback_correct;
  std::optional<std::size_t> question_index;  // absent in Idle and Won
  std::size_t question_count = 0;
  std::string question_id;
  std::string question_text;
  std::array<AnswerView, kCornerCount> answers{};
  std::optional<int> correct_corner;  // revealed in Feedback only
  std::vector<std::string> ladder;
  int score_level = 0;
  std::optional<int> highlighted;
  std::optional<int> answered;  // corner the player confirmed
  std::optional<int> selected;
  Point2 position{0.5, 0.5};
  bool position_available = false;
  std::array<BeaconReadout, kCornerCount> beacons{};
  bool confirm_enabled = false;
};

StateSnapshot make_snapshot(std::uint64_t seq, const GameState& game, const QuestionBank& bank,
                            const LocalizationFrame& frame,
                            const std::array<FilteredSignal, kCornerCount>& signals,
                            const RoomModel& room);

/// Wire form: {"type":"snapshot","seq":N,...}. Key order is fixed so equal
/// snapshots serialize to identical bytes.
std::string to_json(const StateSnapshot& s);

}  // namespace blequiz
