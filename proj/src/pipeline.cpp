#include "blequiz/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blequiz {

FilterState::FilterState(int beacon_id, std::size_t window_size)
    : beacon_id_(beacon_id), window_size_(window_size) {
  if (window_size_ < 1) throw std::invalid_argument("window_size must be >= 1");
}

FilteredSignal FilterState::push(double rssi_dbm, TimestampMs ts_ms) {
  if (window_.size() == window_size_) window_.pop_front();
  window_.push_back(rssi_dbm);
  last_ts_ = ts_ms;
  // Recomputed from scratch: the window is small and a running sum drifts.
  mean_ = std::accumulate(window_.begin(), window_.end(), 0.0) / static_cast<double>(window_.size());
  return signal();
}

FilteredSignal FilterState::signal() const {
  return {beacon_id_, mean_, window_.size(), window_size_, last_ts_};
}

void FilterState::clear() {
  window_.clear();
  mean_ = 0.0;
  last_ts_ = 0;
}

DistanceEstimate estimate_distance(const FilteredSignal& signal, const PropagationParams& params,
                                   double tx_power_1m, double d_max) {
  if (signal.sample_count == 0) {
    throw NoDataError("no samples for beacon " + std::to_string(signal.beacon_id));
  }
  const double exponent = (tx_power_1m - signal.mean_rssi) / (10.0 * params.path_loss_exponent);
  const double d = std::clamp(std::pow(10.0, exponent), params.d_min, d_max);
  return {signal.beacon_id, d, std::min(1.0, signal.confidence())};
}

namespace {

bool uuid_equal(const std::string& a, const std::string& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

}  // namespace

SignalPipeline::SignalPipeline(std::array<std::string, kCornerCount> uuids, std::size_t window_size)
    : uuids_(std::move(uuids)),
      window_size_(window_size),
      filters_{FilterState(0, window_size), FilterState(1, window_size),
               FilterState(2, window_size), FilterState(3, window_size)} {}

SignalPipeline SignalPipeline::for_room(const RoomModel& room, std::size_t window_size) {
  std::array<std::string, kCornerCount> uuids;
  for (int k = 0; k < kCornerCount; ++k) uuids[k] = room.beacons[k].uuid;
  return SignalPipeline(std::move(uuids), window_size);
}

std::optional<FilteredSignal> SignalPipeline::push_sample(const RssiSample& sample) {
  if (!is_corner_index(sample.beacon_id) || !uuid_equal(sample.uuid, uuids_[sample.beacon_id])) {
    ++counters_.unknown_beacon;
    return std::nullopt;
  }
  FilterState& f = filters_[sample.beacon_id];
  if (f.has_data() && sample.ts_ms < f.last_ts()) {
    ++counters_.out_of_order;
    return std::nullopt;
  }
  ++counters_.accepted;
  return f.push(sample.rssi_dbm, sample.ts_ms);
}

FilteredSignal SignalPipeline::signal(int beacon_id) const { return filters_.at(beacon_id).signal(); }

std::array<FilteredSignal, kCornerCount> SignalPipeline::signals() const {
  return {filters_[0].signal(), filters_[1].signal(), filters_[2].signal(), filters_[3].signal()};
}

void SignalPipeline::reset() {
  for (auto& f : filters_) f.clear();
  counters_ = {};
}

}  // namespace blequiz
