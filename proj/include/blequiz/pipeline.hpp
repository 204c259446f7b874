#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "blequiz/propagation.hpp"

namespace blequiz {

inline constexpr std::size_t kDefaultWindowSize = 10;
inline constexpr double kDefaultMaxDistance = 50.0;  // m
inline constexpr TimestampMs kStaleAfterMs = 2000;

struct FilteredSignal {
  int beacon_id = 0;
  double mean_rssi = 0.0;  // meaningless while sample_count == 0
  std::size_t sample_count = 0;
  std::size_t window_size = kDefaultWindowSize;
  TimestampMs last_ts = 0;

  double confidence() const {
    return static_cast<double>(sample_count) / static_cast<double>(window_size);
  }
};

/// Moving average over the last `window_size` readings of one beacon.
class FilterState {
 public:
  explicit FilterState(int beacon_id = 0, std::size_t window_size = kDefaultWindowSize);

  /// Appends a reading, evicting the oldest when the window is full.
  FilteredSignal push(double rssi_dbm, TimestampMs ts_ms);

  FilteredSignal signal() const;
  void clear();

  std::size_t size() const { return window_.size(); }
  std::size_t window_size() const { return window_size_; }
  bool has_data() const { return !window_.empty(); }
  TimestampMs last_ts() const { return last_ts_; }
  const std::deque<double>& window() const { return window_; }

 private:
  int beacon_id_;
  std::size_t window_size_;
  std::deque<double> window_;
  double mean_ = 0.0;
  TimestampMs last_ts_ = 0;
};

struct DistanceEstimate {
  int beacon_id = 0;
  double distance = kDefaultMaxDistance;  // m
  double confidence = 0.0;                // sample_count / window_size
};

/// Inverts the log-distance model on the filtered mean:
/// d = 10^((tx_power_1m - mean_rssi) / (10 n)), clamped to [d_min, d_max].
/// Throws NoDataError for an empty window.
DistanceEstimate estimate_distance(const FilteredSignal& signal, const PropagationParams& params,
                                   double tx_power_1m, double d_max = kDefaultMaxDistance);

struct PipelineCounters {
  std::uint64_t accepted = 0;
  std::uint64_t unknown_beacon = 0;
  std::uint64_t out_of_order = 0;

  friend bool operator==(const PipelineCounters&, const PipelineCounters&) = default;
};

/// Per-beacon filter set fed by a single sample stream.
///
/// A sample is accepted only if its uuid is the one registered for its
/// beacon_id and its timestamp does not go backwards for that beacon.
/// Rejections are counted, never thrown.
class SignalPipeline {
 public:
  SignalPipeline(std::array<std::string, kCornerCount> uuids,
                 std::size_t window_size = kDefaultWindowSize);

  static SignalPipeline for_room(const RoomModel& room, std::size_t window_size = kDefaultWindowSize);

  std::optional<FilteredSignal> push_sample(const RssiSample& sample);

  FilteredSignal signal(int beacon_id) const;
  std::array<FilteredSignal, kCornerCount> signals() const;
  const FilterState& filter(int beacon_id) const { return filters_.at(beacon_id); }
  const PipelineCounters& counters() const { return counters_; }
  std::size_t window_size() const { return window_size_; }

  /// Empties every window and zeroes the counters.
  void reset();

 private:
  std::array<std::string, kCornerCount> uuids_;
  std::size_t window_size_;
  std::array<FilterState, kCornerCount> filters_;
  PipelineCounters counters_;
};

}  // namespace blequiz
