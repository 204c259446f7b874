#include "blequiz/localization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blequiz {

void SelectionPolicy::validate() const {
  if (!(enter_threshold > 0.0 && enter_threshold < exit_threshold)) {
    throw std::invalid_argument("thresholds must satisfy 0 < enter_threshold < exit_threshold");
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("min_confidence must be within [0, 1]");
  }
  if (!(centroid_exponent > 0.0) || !std::isfinite(centroid_exponent)) {
    throw std::invalid_argument("centroid_exponent must be > 0");
  }
}

LocalizationFrame LocalizationFrame::initial(TimestampMs ts) {
  LocalizationFrame f;
  for (int k = 0; k < kCornerCount; ++k) f.distances[k] = {k, kDefaultMaxDistance, 0.0};
  f.ts = ts;
  return f;
}

CornerSelection select_corner(const DistanceSet& distances, const SelectionPolicy& policy,
                              const CornerSelection& previous, TimestampMs now) {
  std::optional<int> best;
  for (int k = 0; k < kCornerCount; ++k) {
    const auto& d = distances[k];
    if (d.distance < policy.enter_threshold && d.confidence >= policy.min_confidence) {
      if (!best || d.distance < distances[*best].distance) best = k;
    }
  }

  if (previous.selected) {
    const int held = *previous.selected;
    const auto& hd = distances[held];
    const bool keep = hd.distance < policy.exit_threshold && hd.confidence >= policy.min_confidence;
    if (keep) {
      if (best && *best != held && distances[*best].distance < hd.distance) {
        return {best, now};
      }
      return previous;
    }
  }
  if (best) return {best, now};
  if (!previous.selected) return previous;
  return {std::nullopt, now};
}

std::optional<Point2> estimate_position(const DistanceSet& distances, const RoomModel& room,
                                        const SelectionPolicy& policy) {
  double wsum = 0.0;
  Point2 acc{};
  for (int k = 0; k < kCornerCount; ++k) {
    if (!(distances[k].confidence > 0.0)) return std::nullopt;
    const double d = std::max(distances[k].distance, room.propagation.d_min);
    const double w = 1.0 / std::pow(d, policy.centroid_exponent);
    const Point2 c = unit_corner(k);
    acc.x += w * c.x;
    acc.y += w * c.y;
    wsum += w;
  }
  return Point2{std::clamp(acc.x / wsum, 0.0, 1.0), std::clamp(acc.y / wsum, 0.0, 1.0)};
}

LocalizationFrame tick(const std::array<FilteredSignal, kCornerCount>& signals,
                       const RoomModel& room, const SelectionPolicy& policy,
                       const LocalizationFrame& previous, TimestampMs now) {
  if (now < previous.ts) throw std::invalid_argument("localization tick went back in time");

  LocalizationFrame frame;
  frame.ts = now;
  for (int k = 0; k < kCornerCount; ++k) {
    const FilteredSignal& s = signals[k];
    if (s.sample_count == 0) {
      frame.distances[k] = {k, kDefaultMaxDistance, 0.0};
      continue;
    }
    DistanceEstimate est =
        estimate_distance(s, room.propagation, room.beacons[k].tx_power_1m, kDefaultMaxDistance);
    if (now - s.last_ts > kStaleAfterMs) est.confidence = 0.0;
    frame.distances[k] = est;
  }

  frame.selection = select_corner(frame.distances, policy, previous.selection, now);

  if (auto p = estimate_position(frame.distances, room, policy)) {
    frame.position = *p;
    frame.position_available = true;
  } else {
    frame.position = previous.position;
    frame.position_available = false;
  }
  return frame;
}

}  // namespace blequiz
