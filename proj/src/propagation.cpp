#include "blequiz/propagation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace blequiz {

void PropagationParams::validate() const {
  if (!(path_loss_exponent > 0.0) || !std::isfinite(path_loss_exponent)) {
    throw std::invalid_argument("path_loss_exponent must be > 0");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("noise_sigma must be >= 0");
  }
  if (!(d_min > 0.0) || !std::isfinite(d_min)) {
    throw std::invalid_argument("d_min must be > 0");
  }
}

std::string default_beacon_uuid(int beacon_id) {
  return "b1e0c0de-5a17-4e2d-9c3f-00000000000" + std::to_string(beacon_id + 1);
}

RoomModel RoomModel::make(double width, double depth, PropagationParams propagation) {
  static const std::array<CornerStyle, kCornerCount> kStyles{{
      {"blue", 1},
      {"red", 2},
      {"green", 3},
      {"yellow", 4},
  }};
  RoomModel room;
  room.width = width;
  room.depth = depth;
  room.propagation = propagation;
  room.corner_styles = kStyles;
  for (int k = 0; k < kCornerCount; ++k) {
    BeaconSpec& b = room.beacons[k];
    b.id = k;
    b.uuid = default_beacon_uuid(k);
    b.position = room.corner(k);
  }
  return room;
}

Point2 RoomModel::corner(int k) const {
  const Point2 u = unit_corner(k);
  return {u.x * width, u.y * depth};
}

bool RoomModel::contains(Point2 p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= depth;
}

void RoomModel::validate() const {
  if (!(width >= kMinSide && width <= kMaxSide)) {
    throw std::invalid_argument("room width must be within [2, 50] m");
  }
  if (!(depth >= kMinSide && depth <= kMaxSide)) {
    throw std::invalid_argument("room depth must be within [2, 50] m");
  }
  propagation.validate();
  std::set<std::string> uuids;
  for (int k = 0; k < kCornerCount; ++k) {
    const BeaconSpec& b = beacons[k];
    const std::string where = "beacon " + std::to_string(k);
    if (b.id != k) throw std::invalid_argument(where + ": id must equal its corner index");
    if (!is_canonical_uuid(b.uuid)) throw std::invalid_argument(where + ": uuid is not canonical");
    std::string lowered = b.uuid;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!uuids.insert(lowered).second) throw std::invalid_argument(where + ": duplicate uuid");
    if (distance(b.position, corner(k)) > 1e-9) {
      throw std::invalid_argument(where + ": position must coincide with its room corner");
    }
    if (b.advertise_interval_ms <= 0) {
      throw std::invalid_argument(where + ": advertise_interval_ms must be > 0");
    }
    if (!std::isfinite(b.tx_power_1m)) throw std::invalid_argument(where + ": tx_power_1m not finite");
  }
}

bool is_canonical_uuid(std::string_view s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (s[i] != '-') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

double path_loss_rssi(double distance_m, double tx_power_1m, const PropagationParams& params) {
  const double d = std::max(distance_m, params.d_min);
  return tx_power_1m - 10.0 * params.path_loss_exponent * std::log10(d);
}

namespace {

const BeaconSpec& checked_beacon(const RoomModel& room, int beacon_id, Point2 player) {
  if (!is_corner_index(beacon_id)) {
    throw std::invalid_argument("beacon_id out of range: " + std::to_string(beacon_id));
  }
  if (!room.contains(player)) throw std::invalid_argument("player position outside the room");
  return room.beacons[beacon_id];
}

}  // namespace

double noise_free_rssi(const RoomModel& room, int beacon_id, Point2 player) {
  const BeaconSpec& b = checked_beacon(room, beacon_id, player);
  return path_loss_rssi(distance(player, b.position), b.tx_power_1m, room.propagation);
}

double rssi_at(const RoomModel& room, int beacon_id, Point2 player, Rng& rng) {
  const double clean = noise_free_rssi(room, beacon_id, player);
  std::normal_distribution<double> unit(0.0, 1.0);
  return clean + room.propagation.noise_sigma * unit(rng);
}

PlayerPath PlayerPath::stationary(Point2 p) {
  PlayerPath path;
  path.add(0, p);
  return path;
}

PlayerPath PlayerPath::walk(const std::vector<Point2>& waypoints, double speed_mps,
                            TimestampMs start_ms) {
  if (!(speed_mps > 0.0)) throw std::invalid_argument("walking speed must be > 0");
  PlayerPath path;
  double t = static_cast<double>(start_ms);
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (i > 0) t += distance(waypoints[i - 1], waypoints[i]) / speed_mps * 1000.0;
    path.add(static_cast<TimestampMs>(std::llround(t)), waypoints[i]);
  }
  return path;
}

void PlayerPath::add(TimestampMs ts_ms, Point2 p) {
  if (!keys_.empty() && ts_ms < keys_.back().ts_ms) {
    throw std::invalid_argument("player path keyframes must be time-ordered");
  }
  keys_.push_back({ts_ms, p});
}

Point2 PlayerPath::position_at(TimestampMs ts_ms) const {
  if (keys_.empty()) throw std::logic_error("empty player path");
  if (ts_ms <= keys_.front().ts_ms) return keys_.front().position;
  if (ts_ms >= keys_.back().ts_ms) return keys_.back().position;
  auto hi = std::upper_bound(keys_.begin(), keys_.end(), ts_ms,
                             [](TimestampMs t, const Keyframe& k) { return t < k.ts_ms; });
  auto lo = std::prev(hi);
  const double span = static_cast<double>(hi->ts_ms - lo->ts_ms);
  const double f = span > 0.0 ? static_cast<double>(ts_ms - lo->ts_ms) / span : 1.0;
  return {lo->position.x + f * (hi->position.x - lo->position.x),
          lo->position.y + f * (hi->position.y - lo->position.y)};
}

BeaconSimulator::BeaconSimulator(RoomModel room, std::uint64_t seed)
    : room_(std::move(room)), rng_(seed) {
  room_.validate();
  for (int k = 0; k < kCornerCount; ++k) next_emit_[k] = room_.beacons[k].advertise_interval_ms;
}

std::vector<RssiSample> BeaconSimulator::advance(TimestampMs until, const PlayerPath& path) {
  if (until < clock_) {
    throw std::invalid_argument("advance: until (" + std::to_string(until) +
                                ") is before the simulator clock (" + std::to_string(clock_) + ")");
  }
  std::vector<std::pair<TimestampMs, int>> emissions;
  for (int k = 0; k < kCornerCount; ++k) {
    const auto interval = room_.beacons[k].advertise_interval_ms;
    while (next_emit_[k] <= until) {
      emissions.emplace_back(next_emit_[k], k);
      next_emit_[k] += interval;
    }
  }
  std::sort(emissions.begin(), emissions.end());

  std::vector<RssiSample> out;
  out.reserve(emissions.size());
  for (const auto& [ts, k] : emissions) {
    const Point2 where = path.position_at(ts);
    out.push_back({ts, k, room_.beacons[k].uuid, rssi_at(room_, k, where, rng_)});
  }
  clock_ = until;
  return out;
}

}  // namespace blequiz
