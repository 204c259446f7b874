#include "blequiz/game.hpp"

#include <algorithm>
#include <numeric>

namespace blequiz {

namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 6> kPhaseNames{{
    {Phase::Idle, "idle"},
    {Phase::QuestionShown, "question_shown"},
    {Phase::AnswerHighlighted, "answer_highlighted"},
    {Phase::Feedback, "feedback"},
    {Phase::Won, "won"},
    {Phase::GameOver, "game_over"},
}};

}  // namespace

std::string_view phase_name(Phase p) {
  for (const auto& [phase, name] : kPhaseNames) {
    if (phase == p) return name;
  }
  return "unknown";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (const auto& [phase, n] : kPhaseNames) {
    if (n == name) return phase;
  }
  return std::nullopt;
}

const std::array<int, kCornerCount>& GameState::answers_mapping() const {
  static constexpr std::array<int, kCornerCount> kIdentity{0, 1, 2, 3};
  if (question_index < mappings.size()) return mappings[question_index];
  return kIdentity;
}

GameState start_game(const QuestionBank& bank, Rng& rng, bool shuffle_answers) {
  if (bank.questions.empty()) throw IllegalTransition("cannot start: question bank is empty");
  GameState s;
  s.phase = Phase::QuestionShown;
  s.mappings.resize(bank.size());
  for (auto& m : s.mappings) {
    std::iota(m.begin(), m.end(), 0);
    if (shuffle_answers) std::shuffle(m.begin(), m.end(), rng);
  }
  return s;
}

GameState apply_selection(const GameState& state, const CornerSelection& selection) {
  if (state.phase != Phase::QuestionShown && state.phase != Phase::AnswerHighlighted) return state;
  GameState next = state;
  if (selection.selected && is_corner_index(*selection.selected)) {
    next.phase = Phase::AnswerHighlighted;
    next.highlighted = selection.selected;
  } else {
    next.phase = Phase::QuestionShown;
    next.highlighted.reset();
  }
  return next;
}

GameState confirm(const GameState& state, const QuestionBank& bank) {
  if (state.phase != Phase::AnswerHighlighted || !state.highlighted) {
    throw IllegalTransition("confirm is only allowed while an answer is highlighted (phase " +
                            std::string(phase_name(state.phase)) + ")");
  }
  const Question& q = bank.questions.at(state.question_index);
  GameState next = state;
  const bool correct = state.answers_mapping()[*state.highlighted] == q.correct_index;
  next.phase = Phase::Feedback;
  next.feedback_correct = correct;
  next.answered = state.highlighted;
  next.highlighted.reset();
  if (correct) ++next.score_level;
  return next;
}

GameState advance(const GameState& state, const QuestionBank& bank) {
  if (state.phase != Phase::Feedback || !state.feedback_correct) {
    throw IllegalTransition("advance is only allowed after feedback (phase " +
                            std::string(phase_name(state.phase)) + ")");
  }
  GameState next = state;
  next.feedback_correct.reset();
  if (!*state.feedback_correct) {
    next.phase = Phase::GameOver;
  } else if (state.question_index + 1 < bank.size()) {
    next.answered.reset();
    next.phase = Phase::QuestionShown;
    ++next.question_index;
  } else {
    next.phase = Phase::Won;
    next.question_index = bank.size();
  }
  return next;
}

GameState reset_game(const GameState&) { return GameState{}; }

}  // namespace blequiz
