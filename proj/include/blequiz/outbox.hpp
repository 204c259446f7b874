#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

namespace blequiz {

using Frame = std::shared_ptr<const std::string>;

/// Per-client send queue. Control frames (errors) queue in order; snapshots
/// conflate into a single slot holding the newest one not yet sent, so a
/// slow client skips ahead but never sees a lower sequence number after a
/// higher one.
class ClientOutbox {
 public:
  /// Offers snapshot `seq`. Stale or already-sent sequence numbers are dropped.
  void offer_snapshot(std::uint64_t seq, Frame frame);

  void push_control(std::string frame);

  /// Next frame to write, control frames first. Empty when nothing is pending.
  std::optional<Frame> take();

  bool empty() const { return control_.empty() && !pending_; }
  std::optional<std::uint64_t> last_sent_seq() const { return last_sent_; }

 private:
  std::deque<Frame> control_;
  std::optional<std::pair<std::uint64_t, Frame>> pending_;
  std::optional<std::uint64_t> last_sent_;
};

}  // namespace blequiz
