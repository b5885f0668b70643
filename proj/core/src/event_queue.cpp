#include "rsim/event_queue.hpp"

#include <stdexcept>
#include <string>

namespace rsim {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void EventQueue::schedule(Event ev) {
  if (ev.fire_at < now_) {
    throw std::logic_error("event scheduled in the past: fire_at=" +
                           std::to_string(ev.fire_at) + " now=" + std::to_string(now_));
  }
  ev.sequence = next_sequence_++;
  heap_.push(ev);
}

std::optional<Event> EventQueue::pop_next() {
  if (heap_.empty()) return std::nullopt;
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.fire_at;
  ++dispatched_;
  digest_ = mix(digest_, static_cast<std::uint64_t>(ev.fire_at));
  digest_ = mix(digest_, ev.sequence);
  digest_ = mix(digest_, static_cast<std::uint64_t>(ev.kind));
  digest_ = mix(digest_, ev.key);
  digest_ = mix(digest_, static_cast<std::uint64_t>(static_cast<std::int64_t>(ev.actor)));
  digest_ = mix(digest_, static_cast<std::uint64_t>(static_cast<std::int64_t>(ev.server)));
  return ev;
}

}  // namespace rsim
