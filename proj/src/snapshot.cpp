#include "blequiz/snapshot.hpp"

#include "json.hpp"

namespace blequiz {

using nlohmann::ordered_json;

StateSnapshot make_snapshot(std::uint64_t seq, const GameState& game, const QuestionBank& bank,
                            const LocalizationFrame& frame,
                            const std::array<FilteredSignal, kCornerCount>& signals,
                            const RoomModel& room) {
  StateSnapshot s;
  s.seq = seq;
  s.ts_ms = frame.ts;
  s.phase = game.phase;
  s.feedback_correct = game.feedback_correct;
  s.question_count = bank.size();
  s.ladder = bank.ladder;
  s.score_level = game.score_level;
  s.highlighted = game.highlighted;
  s.answered = game.answered;
  s.selected = frame.selection.selected;
  s.position = frame.position;
  s.position_available = frame.position_available;
  s.confirm_enabled = game.phase == Phase::AnswerHighlighted;

  const bool has_question = game.phase != Phase::Idle && game.phase != Phase::Won &&
                            game.question_index < bank.size();
  const auto& mapping = game.answers_mapping();
  for (int k = 0; k < kCornerCount; ++k) {
    AnswerView& a = s.answers[k];
    a.corner = k;
    a.color = room.corner_styles[k].color;
    a.number = room.corner_styles[k].number;
    if (has_question) a.text = bank.questions[game.question_index].answers[mapping[k]];
  }
  if (has_question) {
    const Question& q = bank.questions[game.question_index];
    s.question_index = game.question_index;
    s.question_id = q.id;
    s.question_text = q.text;
    if (game.phase == Phase::Feedback || game.phase == Phase::GameOver) {
      for (int k = 0; k < kCornerCount; ++k) {
        if (mapping[k] == q.correct_index) s.correct_corner = k;
      }
    }
  }

  for (int k = 0; k < kCornerCount; ++k) {
    BeaconReadout& b = s.beacons[k];
    b.id = k;
    if (signals[k].sample_count > 0) b.mean_rssi = signals[k].mean_rssi;
    b.distance = frame.distances[k].distance;
    b.confidence = frame.distances[k].confidence;
  }
  return s;
}

namespace {

template <typename T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string to_json(const StateSnapshot& s) {
  ordered_json j;
  j["type"] = "snapshot";
  j["seq"] = s.seq;
  j["ts_ms"] = s.ts_ms;
  j["phase"] = phase_name(s.phase);
  j["feedback_correct"] = opt(s.feedback_correct);
  j["confirm_enabled"] = s.confirm_enabled;

  ordered_json q;
  if (s.question_index) {
    q["index"] = *s.question_index;
    q["id"] = s.question_id;
    q["text"] = s.question_text;
  } else {
    q = nullptr;
  }
  j["question"] = q;
  j["question_count"] = s.question_count;

  ordered_json answers = ordered_json::array();
  for (const auto& a : s.answers) {
    answers.push_back(
        {{"corner", a.corner}, {"color", a.color}, {"number", a.number}, {"text", a.text}});
  }
  j["answers"] = std::move(answers);
  j["correct_corner"] = opt(s.correct_corner);
  j["ladder"] = s.ladder;
  j["score_level"] = s.score_level;
  j["highlighted"] = opt(s.highlighted);
  j["answered"] = opt(s.answered);
  j["selected"] = opt(s.selected);
  j["position"] = {{"x", s.position.x}, {"y", s.position.y}, {"available", s.position_available}};

  ordered_json beacons = ordered_json::array();
  for (const auto& b : s.beacons) {
    beacons.push_back({{"id", b.id},
                       {"mean_rssi", opt(b.mean_rssi)},
                       {"distance", b.distance},
                       {"confidence", b.confidence}});
  }
  j["beacons"] = std::move(beacons);
  return j.dump();
}

}  // namespace blequiz
