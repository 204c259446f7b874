#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blequiz/localization.hpp"
#include "blequiz/propagation.hpp"

namespace blequiz {

struct Question {
  std::string id;
  std::string text;
  std::array<std::string, kCornerCount> answers;
  int correct_index = 0;
};

struct QuestionBank {
  std::vector<Question> questions;
  std::vector<std::string> ladder;  // prize label per question, lowest first

  std::size_t size() const { return questions.size(); }
};

class BankLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Question bank JSON:
//   {"questions":[{"id":"q1","text":"...","answers":["a","b","c","d"],
//                  "correct_index":2}, ...],
//    "ladder":["100","200", ...]}
QuestionBank parse_question_bank(std::string_view json_text);
QuestionBank load_question_bank(std::istream& source);
QuestionBank load_question_bank(const std::filesystem::path& path);

/// The bank used when no question file is configured.
const QuestionBank& builtin_question_bank();

enum class Phase { Idle, QuestionShown, AnswerHighlighted, Feedback, Won, GameOver };

std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

/// Thrown for confirm/advance in a phase that does not allow it.
class IllegalTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Quiz progress. Answer-to-corner mappings for every question are drawn
/// when the game starts, so the state is a plain value.
struct GameState {
  Phase phase = Phase::Idle;
  std::size_t question_index = 0;
  std::optional<int> highlighted;
  std::optional<bool> feedback_correct;  // set only in Feedback
  std::optional<int> answered;           // confirmed corner, Feedback through Won/GameOver
  int score_level = 0;
  // mappings[q][corner] is the answer slot shown at `corner` for question q.
  std::vector<std::array<int, kCornerCount>> mappings;

  const std::array<int, kCornerCount>& answers_mapping() const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// Throws IllegalTransition for an empty bank.
GameState start_game(const QuestionBank& bank, Rng& rng, bool shuffle_answers = true);

/// Highlights the selected corner, or returns to QuestionShown when the
/// selection is released. A no-op outside QuestionShown/AnswerHighlighted.
GameState apply_selection(const GameState& state, const CornerSelection& selection);

GameState confirm(const GameState& state, const QuestionBank& bank);
GameState advance(const GameState& state, const QuestionBank& bank);
GameState reset_game(const GameState& state);

}  // namespace blequiz
