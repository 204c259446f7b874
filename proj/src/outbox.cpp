#include "blequiz/outbox.hpp"

namespace blequiz {

void ClientOutbox::offer_snapshot(std::uint64_t seq, Frame frame) {
  if (last_sent_ && seq <= *last_sent_) return;
  if (pending_ && seq <= pending_->first) return;
  pending_.emplace(seq, std::move(frame));
}

void ClientOutbox::push_control(std::string frame) {
  control_.push_back(std::make_shared<const std::string>(std::move(frame)));
}

std::optional<Frame> ClientOutbox::take() {
  if (!control_.empty()) {
    Frame f = std::move(control_.front());
    control_.pop_front();
    return f;
  }
  if (pending_) {
    last_sent_ = pending_->first;
    Frame f = std::move(pending_->second);
    pending_.reset();
    return f;
  }
  return std::nullopt;
}

}  // namespace blequiz
