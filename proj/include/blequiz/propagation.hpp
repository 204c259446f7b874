#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "blequiz/types.hpp"

namespace blequiz {

/// Every random draw in the simulator goes through this engine.
using Rng = std::mt19937_64;

struct BeaconSpec {
  int id = 0;
  std::string uuid;
  Point2 position;
  double tx_power_1m = -59.0;  // dBm received at 1 m
  std::int64_t advertise_interval_ms = 100;

  friend bool operator==(const BeaconSpec&, const BeaconSpec&) = default;
};

/// Log-distance path-loss model parameters.
struct PropagationParams {
  double path_loss_exponent = 2.0;
  double noise_sigma = 2.0;  // dB
  double d_min = 0.1;        // m, clamp below which distance is not modeled

  void validate() const;

  friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

struct CornerStyle {
  std::string color;
  int number = 0;

  friend bool operator==(const CornerStyle&, const CornerStyle&) = default;
};

/// Rectangular room with one beacon per corner. Corner k holds beacon k.
struct RoomModel {
  double width = 6.0;
  double depth = 6.0;
  std::array<BeaconSpec, kCornerCount> beacons;
  PropagationParams propagation;
  std::array<CornerStyle, kCornerCount> corner_styles;

  static constexpr double kMinSide = 2.0;
  static constexpr double kMaxSide = 50.0;

  /// Default four-beacon room: canonical UUIDs, blue/red/green/yellow
  /// corners numbered 1-4, -59 dBm at 1 m, 100 ms advertising.
  static RoomModel make(double width, double depth, PropagationParams propagation = {});

  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;

  bool contains(Point2 p) const;
  Point2 center() const { return {width / 2.0, depth / 2.0}; }
  Point2 corner(int k) const;
  Point2 to_unit(Point2 meters) const { return {meters.x / width, meters.y / depth}; }
  Point2 from_unit(Point2 unit) const { return {unit.x * width, unit.y * depth}; }

  friend bool operator==(const RoomModel&, const RoomModel&) = default;
};

/// Canonical 8-4-4-4-12 hex form, either case.
bool is_canonical_uuid(std::string_view s);

std::string default_beacon_uuid(int beacon_id);

/// tx_power_1m - 10 n log10(max(d, d_min)), no noise.
double path_loss_rssi(double distance_m, double tx_power_1m, const PropagationParams& params);

double noise_free_rssi(const RoomModel& room, int beacon_id, Point2 player);

/// One received-power draw for beacon `beacon_id` heard at `player`.
/// Consumes exactly one standard-normal draw from `rng`, even when sigma is 0.
double rssi_at(const RoomModel& room, int beacon_id, Point2 player, Rng& rng);

struct RssiSample {
  TimestampMs ts_ms = 0;
  int beacon_id = 0;
  std::string uuid;
  double rssi_dbm = 0.0;

  friend bool operator==(const RssiSample&, const RssiSample&) = default;
};

/// Piecewise-linear player trajectory through timestamped keyframes.
/// Before the first keyframe and after the last, the position is held.
class PlayerPath {
 public:
  struct Keyframe {
    TimestampMs ts_ms;
    Point2 position;
  };

  PlayerPath() = default;

  static PlayerPath stationary(Point2 p);

  /// Walk through `waypoints` at a constant speed, starting at `start_ms`.
  static PlayerPath walk(const std::vector<Point2>& waypoints, double speed_mps,
                         TimestampMs start_ms = 0);

  /// Keyframes must be appended in non-decreasing time order.
  void add(TimestampMs ts_ms, Point2 p);

  Point2 position_at(TimestampMs ts_ms) const;
  bool empty() const { return keys_.empty(); }
  TimestampMs end_ms() const { return keys_.empty() ? 0 : keys_.back().ts_ms; }
  const std::vector<Keyframe>& keyframes() const { return keys_; }

 private:
  std::vector<Keyframe> keys_;
};

/// Seeded stand-in for the four beacons and the radio channel between them
/// and the player. Beacon k broadcasts at interval_k, 2*interval_k, ...
class BeaconSimulator {
 public:
  BeaconSimulator(RoomModel room, std::uint64_t seed);

  /// Samples for every broadcast in (clock, until], ordered by timestamp and
  /// then beacon id. Advances the clock to `until`.
  std::vector<RssiSample> advance(TimestampMs until, const PlayerPath& path);

  TimestampMs clock() const { return clock_; }
  const RoomModel& room() const { return room_; }

 private:
  RoomModel room_;
  Rng rng_;
  TimestampMs clock_ = 0;
  std::array<TimestampMs, kCornerCount> next_emit_{};
};

}  // namespace blequiz
