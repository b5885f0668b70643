#pragma once

#include <cstdint>
#include <deque>
#include <limits>

#include "rsim/feedback.hpp"
#include "rsim/time.hpp"

namespace rsim {

enum class RateControlMode {
  None,           // limiter always admits; no rate adjustment
  SendReceive,    // decrease when the send rate exceeds the receive rate
  QueueFeedback,  // decrease when the reported queue length exceeds a threshold
};

struct RateLimiterConfig {
  SimTime delta = 20 * kMillisecond;  // sliding window, also the rate unit (keys per delta)
  double beta = 0.2;                  // multiplicative decrease factor
  double gamma = 0.000004;            // cubic growth coefficient, keys/delta per ms^3
  double additive_step = 10.0;        // cap on a single increase (s_max)
  double queue_threshold = 5.0;       // feedback queue length that triggers a decrease
  double rate_floor = 0.01;           // send rate never drops below this
  double initial_rate = 10.0;         // keys per delta at start
};

// Counters accumulated while the limiter runs; they let a full run be audited
// for the floor, the reference-rate guard, and the decrease hysteresis
// without re-deriving limiter state from traces.
struct RateLimiterAudit {
  double min_rate = std::numeric_limits<double>::infinity();
  double min_reference_rate = std::numeric_limits<double>::infinity();
  SimTime min_decrease_gap = std::numeric_limits<SimTime>::max();  // now - T_inc at decreases
  std::uint64_t decreases = 0;
  std::uint64_t increases = 0;
  std::uint64_t capped_increases = 0;  // additive step bound the increase
  std::uint64_t floor_hits = 0;        // decrease landed on the floor, reference held
};

// Per-destination send limiter. The send rate follows a cubic curve anchored
// at the rate before the last decrease: after a multiplicative drop it climbs
// back quickly, flattens around the old level, and probes beyond it only if
// no new decrease happens. Decreases are held off within two window lengths
// of the last increase so one burst cannot collapse the rate.
class RateLimiter {
 public:
  RateLimiter() = default;
  RateLimiter(const RateLimiterConfig& cfg, RateControlMode mode, SimTime now);

  // True iff sends in (now - delta, now] stay strictly below the send rate.
  bool admits(SimTime now) const;

  void record_send(SimTime now);
  void record_receipt(SimTime now);

  // Applies the rate adjustment that runs when a value comes back.
  void on_feedback(const Feedback& fb, SimTime now);

  // Earliest time at or after `now` when admits() would pass, assuming no
  // further sends; used to schedule backlog retries.
  SimTime earliest_admission(SimTime now) const;

  double send_rate() const { return send_rate_; }
  double reference_rate() const { return reference_rate_; }
  // Values received in the trailing window, in keys per delta.
  double receive_rate(SimTime now) const;
  std::int64_t sends_in_window(SimTime now) const;
  SimTime last_decrease_at() const { return t_dec_; }
  SimTime last_increase_at() const { return t_inc_; }
  RateControlMode mode() const { return mode_; }
  const RateLimiterAudit& audit() const { return audit_; }

  // The cubic target rate as a function of milliseconds since the last
  // decrease. Exposed so its anchor points can be checked directly.
  static double cubic_target(double dt_ms, double reference_rate, double beta, double gamma);

 private:
  void prune(std::deque<SimTime>& log, SimTime now);
  std::int64_t count_in_window(const std::deque<SimTime>& log, SimTime now) const;

  RateLimiterConfig cfg_;
  RateControlMode mode_ = RateControlMode::None;
  double send_rate_ = 10.0;
  double reference_rate_ = 10.0;
  SimTime t_dec_ = 0;
  SimTime t_inc_ = 0;
  std::deque<SimTime> send_log_;
  std::deque<SimTime> recv_log_;
  RateLimiterAudit audit_;
};

}  // namespace rsim
