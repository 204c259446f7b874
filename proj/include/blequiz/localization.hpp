#pragma once

#include <array>
#include <optional>

#include "blequiz/pipeline.hpp"
#include "blequiz/propagation.hpp"

namespace blequiz {

using DistanceSet = std::array<DistanceEstimate, kCornerCount>;

/// Entry/exit thresholds for "close enough to a corner", plus the
/// weighting exponent for the position icon.
struct SelectionPolicy {
  double enter_threshold = 1.5;  // m
  double exit_threshold = 2.2;   // m
  double min_confidence = 0.5;
  double centroid_exponent = 2.0;

  void validate() const;

  friend bool operator==(const SelectionPolicy&, const SelectionPolicy&) = default;
};

struct CornerSelection {
  std::optional<int> selected;
  TimestampMs since_ts = 0;  // when the current selection was acquired

  friend bool operator==(const CornerSelection&, const CornerSelection&) = default;
};

struct LocalizationFrame {
  DistanceSet distances{};
  CornerSelection selection;
  Point2 position{0.5, 0.5};  // normalized room coordinates
  bool position_available = false;
  TimestampMs ts = 0;

  /// The frame before any sample arrives: nothing selected, icon in the
  /// room center where the player starts.
  static LocalizationFrame initial(TimestampMs ts = 0);
};

/// Hysteresis corner selection.
///
/// Entry: among beacons closer than the enter threshold with enough
/// confidence, the nearest wins (lowest index on ties). A held corner stays
/// selected while it is closer than the exit threshold and still confident;
/// another corner takes over only if it qualifies for entry and is strictly
/// closer than the held one.
CornerSelection select_corner(const DistanceSet& distances, const SelectionPolicy& policy,
                              const CornerSelection& previous, TimestampMs now);

/// Weighted centroid of the normalized corners with weights
/// 1 / max(d, d_min)^g. Empty when any beacon has zero confidence.
std::optional<Point2> estimate_position(const DistanceSet& distances, const RoomModel& room,
                                        const SelectionPolicy& policy);

/// One localization step over the current filter outputs. Signals older
/// than kStaleAfterMs, or empty, get confidence 0. When no position can be
/// estimated the previous one is held.
LocalizationFrame tick(const std::array<FilteredSignal, kCornerCount>& signals,
                       const RoomModel& room, const SelectionPolicy& policy,
                       const LocalizationFrame& previous, TimestampMs now);

}  // namespace blequiz
