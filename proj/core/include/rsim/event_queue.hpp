#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "rsim/time.hpp"

namespace rsim {

enum class EventKind : std::uint8_t {
  KeyGenerated,
  KeyArrivesAtServer,
  ServiceCompletes,
  ValueArrivesAtClient,
  FluctuationTick,
  BacklogRetry,
  MeasurementTick,
};

struct Event {
  SimTime fire_at = 0;
  std::uint64_t sequence = 0;  // assigned by the queue, breaks timestamp ties
  EventKind kind = EventKind::MeasurementTick;
  KeyId key = 0;
  std::int32_t actor = -1;   // generator, client, or server depending on kind
  std::int32_t server = -1;
};

// Min-heap of pending events ordered by (fire_at, sequence). The sequence
// counter makes simultaneous events fire in insertion order, which pins down
// the full execution order of a run.
class EventQueue {
 public:
  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  // Throws std::logic_error if the event would fire before now().
  void schedule(Event ev);

  // Pops the next event and advances the clock to it.
  std::optional<Event> pop_next();

  // Order-sensitive digest of every event popped so far; two runs of the
  // same scenario and seed must agree on it.
  std::uint64_t trace_digest() const { return digest_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ull;
};

}  // namespace rsim
