#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "rsim/feedback.hpp"
#include "rsim/rng.hpp"
#include "rsim/time.hpp"

namespace rsim {

// One event-rate estimate at a server. Each completed key closes a window
// spanning its own service time; the rate sample is the event count in that
// window over its length. A window with no events is widened to include the
// previous window so that very short service times still yield a sample, and
// both the arrival and the service meter are always measured over the same
// interval (the caller picks `combine_previous` once and applies it to both).
class RateMeter {
 public:
  void record() { ++total_; }
  std::uint64_t total() const { return total_; }
  double smoothed() const { return ewma_; }

  // Closes a window of `length` ticks containing `count` events and folds the
  // sample (keys/ms) into the smoothed rate. A zero-length window leaves the
  // estimate untouched.
  double measure(SimTime length, std::uint64_t count, bool combine_previous,
                 double sample_weight);

 private:
  std::uint64_t total_ = 0;
  SimTime prev_length_ = 0;
  std::uint64_t prev_count_ = 0;
  double ewma_ = 0.0;
  bool seeded_ = false;
};

enum class FluctuationMode {
  Faster,  // the boosted regime serves D times faster than the base rate
  Slower,  // the boosted regime is the norm and the other one is D times slower
};

struct ServerConfig {
  int slot_capacity = 4;
  double base_service_ms = 4.0;
  double range_d = 3.0;  // ratio between the two service-rate regimes
  FluctuationMode mode = FluctuationMode::Faster;
  double rate_sample_weight = 0.5;
};

// A replica server: FIFO wait queue in front of `slot_capacity` parallel
// service slots. Service times are exponential around the regime mean, which
// flips between two levels on fluctuation ticks; keys already in service keep
// the duration they were drawn with.
class Server {
 public:
  struct Started {
    KeyId key = 0;
    SimTime duration = 0;
  };

  struct Completion {
    Feedback feedback;
    std::optional<Started> next;  // queued key that just entered service
  };

  Server(ServerId id, const ServerConfig& cfg);

  // Records the arrival; returns the service start when a slot is free,
  // otherwise the key joins the wait queue.
  std::optional<Started> on_key_arrival(KeyId key, SimTime now, RngStream& service_rng);

  // Finishes the key's service: closes its measurement window, frees the
  // slot, admits the next queued key, and assembles the feedback that rides
  // back with the value.
  Completion on_service_complete(KeyId key, SimTime now, RngStream& service_rng);

  // Redraws the regime: either level with equal probability.
  void on_fluctuation_tick(RngStream& fluct_rng);

  ServerId id() const { return id_; }
  std::size_t queue_length() const { return queue_.size(); }
  int busy_slots() const { return static_cast<int>(in_service_.size()); }
  double current_mean_service_ms() const { return current_mean_ms_; }
  // Keys/ms the server can sustain right now across all slots.
  double true_service_rate() const {
    return static_cast<double>(cfg_.slot_capacity) / current_mean_ms_;
  }
  double smoothed_arrival_rate() const { return lambda_meter_.smoothed(); }
  double smoothed_service_rate() const { return mu_meter_.smoothed(); }

 private:
  struct InService {
    KeyId key = 0;
    SimTime arrived = 0;
    SimTime service_start = 0;
    std::uint64_t mu_total_at_start = 0;
    std::uint64_t lambda_total_at_start = 0;
  };

  struct Waiting {
    KeyId key = 0;
    SimTime arrived = 0;
  };

  Started start_service(KeyId key, SimTime arrived, SimTime now, RngStream& service_rng);
  SimTime draw_service_time(RngStream& service_rng) const;

  ServerId id_;
  ServerConfig cfg_;
  double current_mean_ms_;
  std::vector<InService> in_service_;
  std::deque<Waiting> queue_;
  RateMeter lambda_meter_;
  RateMeter mu_meter_;
};

}  // namespace rsim
