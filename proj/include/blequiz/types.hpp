#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace blequiz {

/// Milliseconds since scenario (or session) start.
using TimestampMs = std::int64_t;

inline constexpr int kCornerCount = 4;

/// Corners of the top-view plan, in the fixed enumeration order used
/// everywhere: beacon k, answer corner k and screen corner k all agree.
enum class Corner : int { NW = 0, NE = 1, SW = 2, SE = 3 };

constexpr bool is_corner_index(int k) { return k >= 0 && k < kCornerCount; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Normalized coordinates of corner k: x grows eastward, y grows southward,
/// so NW is (0,0) and SE is (1,1).
constexpr Point2 unit_corner(int k) {
  return {static_cast<double>(k & 1), static_cast<double>((k >> 1) & 1)};
}

// Error types shared across modules.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blequiz
