#include <fstream>
#include <istream>
#include <iterator>

#include "blequiz/game.hpp"
#include "json.hpp"

namespace blequiz {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw BankLoadError(where + ": " + what);
}

Question parse_question(const json& jq, std::size_t i) {
  const std::string where = "questions[" + std::to_string(i) + "]";
  if (!jq.is_object()) fail(where, "expected an object");
  Question q;

  if (auto it = jq.find("id"); it != jq.end()) {
    if (!it->is_string()) fail(where + ".id", "expected a string");
    q.id = it->get<std::string>();
  } else {
    q.id = "q" + std::to_string(i + 1);
  }

  auto text = jq.find("text");
  if (text == jq.end() || !text->is_string() || text->get_ref<const std::string&>().empty()) {
    fail(where + ".text", "expected a non-empty string");
  }
  q.text = text->get<std::string>();

  auto answers = jq.find("answers");
  if (answers == jq.end() || !answers->is_array()) fail(where + ".answers", "expected an array");
  if (answers->size() != kCornerCount) {
    fail(where + ".answers", "expected 4 answers, got " + std::to_string(answers->size()));
  }
  for (std::size_t a = 0; a < kCornerCount; ++a) {
    const json& ja = (*answers)[a];
    if (!ja.is_string() || ja.get_ref<const std::string&>().empty()) {
      fail(where + ".answers[" + std::to_string(a) + "]", "expected a non-empty string");
    }
    q.answers[a] = ja.get<std::string>();
  }

  auto correct = jq.find("correct_index");
  if (correct == jq.end() || !correct->is_number_integer() ||
      !is_corner_index(correct->get<int>())) {
    fail(where + ".correct_index", "expected an integer in 0-3");
  }
  q.correct_index = correct->get<int>();
  return q;
}

}  // namespace

QuestionBank parse_question_bank(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw BankLoadError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  auto questions = doc.find("questions");
  if (questions == doc.end() || !questions->is_array()) fail("questions", "expected an array");
  if (questions->empty()) fail("questions", "question bank is empty");

  QuestionBank bank;
  for (std::size_t i = 0; i < questions->size(); ++i) {
    bank.questions.push_back(parse_question((*questions)[i], i));
  }

  auto ladder = doc.find("ladder");
  if (ladder == doc.end()) {
    for (std::size_t i = 0; i < bank.size(); ++i) bank.ladder.push_back(std::to_string(i + 1));
  } else {
    if (!ladder->is_array()) fail("ladder", "expected an array");
    for (std::size_t i = 0; i < ladder->size(); ++i) {
      const json& rung = (*ladder)[i];
      if (rung.is_string()) {
        bank.ladder.push_back(rung.get<std::string>());
      } else if (rung.is_number()) {
        bank.ladder.push_back(rung.dump());
      } else {
        fail("ladder[" + std::to_string(i) + "]", "expected a string or number");
      }
    }
    if (bank.ladder.size() != bank.size()) {
      fail("ladder", "expected " + std::to_string(bank.size()) + " rungs, got " +
                         std::to_string(bank.ladder.size()));
    }
  }
  return bank;
}

QuestionBank load_question_bank(std::istream& source) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return parse_question_bank(text);
}

QuestionBank load_question_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BankLoadError("cannot open question bank " + path.string());
  try {
    return load_question_bank(in);
  } catch (const BankLoadError& e) {
    throw BankLoadError(path.string() + ": " + e.what());
  }
}

const QuestionBank& builtin_question_bank() {
  static const QuestionBank bank = parse_question_bank(R"json({
  "questions": [
    {"id": "q1", "text": "What does BLE stand for?",
     "answers": ["Bluetooth Low Energy", "Binary Link Exchange", "Broadband Line Extension", "Basic Light Emitter"],
     "correct_index": 0},
    {"id": "q2", "text": "Which unit is used for received signal strength?",
     "answers": ["Hertz", "dBm", "Volt", "Lux"],
     "correct_index": 1},
    {"id": "q3", "text": "Why does GPS work poorly indoors?",
     "answers": ["Satellites are switched off at night", "Buildings block and reflect the signals", "It needs an internet connection", "Phones disable it indoors"],
     "correct_index": 1},
    {"id": "q4", "text": "What does a beacon periodically broadcast?",
     "answers": ["Its battery level only", "Music", "An identifier such as a UUID", "The time of day"],
     "correct_index": 2},
    {"id": "q5", "text": "When you walk away from a beacon, the received signal strength usually...",
     "answers": ["increases", "stays exactly the same", "oscillates at 50 Hz", "decreases"],
     "correct_index": 3},
    {"id": "q6", "text": "What is a moving average filter used for here?",
     "answers": ["Smoothing out noisy measurements", "Encrypting the signal", "Charging the beacon", "Compressing images"],
     "correct_index": 0},
    {"id": "q7", "text": "How many bits does a UUID have?",
     "answers": ["32", "64", "128", "256"],
     "correct_index": 2},
    {"id": "q8", "text": "Which of these is NOT commonly used for indoor positioning?",
     "answers": ["Wi-Fi", "Ultra-wideband", "Bluetooth", "Long-wave radio clocks"],
     "correct_index": 3},
    {"id": "q9", "text": "Industry 4.0 refers to...",
     "answers": ["the fourth version of a web browser", "the digitalization of manufacturing", "a four-day work week", "a car engine standard"],
     "correct_index": 1},
    {"id": "q10", "text": "In the log-distance path-loss model, doubling the distance with exponent 2 costs about...",
     "answers": ["6 dB", "2 dB", "20 dB", "nothing"],
     "correct_index": 0},
    {"id": "q11", "text": "What is RSSI short for?",
     "answers": ["Radio Signal Sync Interval", "Received Signal Strength Indicator", "Remote Sensor Status Index", "Relative Sound Strength Input"],
     "correct_index": 1},
    {"id": "q12", "text": "Which device could replace the tablet in this game?",
     "answers": ["A toaster", "A smartphone", "A pocket calculator", "A wristwatch without radio"],
     "correct_index": 1},
    {"id": "q13", "text": "What helps against the selection flickering between two states near a threshold?",
     "answers": ["More beacons", "A brighter screen", "Hysteresis", "Louder music"],
     "correct_index": 2},
    {"id": "q14", "text": "Autonomous robots on a shop floor need to know...",
     "answers": ["the weather forecast", "the stock market", "their favorite color", "their exact position"],
     "correct_index": 3},
    {"id": "q15", "text": "Which pandemic-era apps used Bluetooth signal strength?",
     "answers": ["Contact-tracing apps", "Video-streaming apps", "Weather apps", "Calculator apps"],
     "correct_index": 0}
  ],
  "ladder": ["100", "200", "300", "500", "1,000", "2,000", "4,000", "8,000", "16,000",
             "32,000", "64,000", "125,000", "250,000", "500,000", "1,000,000"]
})json");
  return bank;
}

}  // namespace blequiz
