#include "rsim/rate_limiter.hpp"

#include <algorithm>
#include <cmath>

namespace rsim {

RateLimiter::RateLimiter(const RateLimiterConfig& cfg, RateControlMode mode, SimTime now)
    : cfg_(cfg),
      mode_(mode),
      send_rate_(cfg.initial_rate),
      reference_rate_(cfg.initial_rate),
      t_dec_(now),
      t_inc_(now) {}

void RateLimiter::prune(std::deque<SimTime>& log, SimTime now) {
  // The window is half open: an entry exactly delta old falls out.
  while (!log.empty() && log.front() <= now - cfg_.delta) log.pop_front();
}

std::int64_t RateLimiter::count_in_window(const std::deque<SimTime>& log, SimTime now) const {
  auto first = std::upper_bound(log.begin(), log.end(), now - cfg_.delta);
  return static_cast<std::int64_t>(log.end() - first);
}

bool RateLimiter::admits(SimTime now) const {
  if (mode_ == RateControlMode::None) return true;
  return static_cast<double>(count_in_window(send_log_, now)) < send_rate_;
}

void RateLimiter::record_send(SimTime now) {
  if (mode_ == RateControlMode::None) return;
  send_log_.push_back(now);
  prune(send_log_, now);
}

void RateLimiter::record_receipt(SimTime now) {
  if (mode_ == RateControlMode::None) return;
  recv_log_.push_back(now);
  prune(recv_log_, now);
}

double RateLimiter::receive_rate(SimTime now) const {
  return static_cast<double>(count_in_window(recv_log_, now));
}

std::int64_t RateLimiter::sends_in_window(SimTime now) const {
  return count_in_window(send_log_, now);
}

double RateLimiter::cubic_target(double dt_ms, double reference_rate, double beta,
                                 double gamma) {
  double saddle = std::cbrt(beta * reference_rate / gamma);
  double x = dt_ms - saddle;
  return gamma * x * x * x + reference_rate;
}

void RateLimiter::on_feedback(const Feedback& fb, SimTime now) {
  if (mode_ == RateControlMode::None) return;
  prune(send_log_, now);
  prune(recv_log_, now);
  double rrate = receive_rate(now);
  bool wants_decrease = mode_ == RateControlMode::QueueFeedback
                            ? fb.queue_length > cfg_.queue_threshold
                            : send_rate_ > rrate;
  if (wants_decrease && now - t_inc_ > 2 * cfg_.delta) {
    ++audit_.decreases;
    audit_.min_decrease_gap = std::min(audit_.min_decrease_gap, now - t_inc_);
    double shrunk = cfg_.beta * send_rate_;
    if (shrunk > cfg_.rate_floor) {
      reference_rate_ = send_rate_;
    } else {
      // Keep the reference: anchoring the cubic at a floor-level rate would
      // stall recovery.
      ++audit_.floor_hits;
    }
    send_rate_ = std::max(shrunk, cfg_.rate_floor);
    t_dec_ = now;
  } else if (send_rate_ < rrate) {
    double dt_ms = to_ms(now - t_dec_);
    double target = cubic_target(dt_ms, reference_rate_, cfg_.beta, cfg_.gamma);
    double stepped = send_rate_ + cfg_.additive_step;
    ++audit_.increases;
    if (stepped < target) ++audit_.capped_increases;
    send_rate_ = std::min(stepped, target);
    t_inc_ = now;
  }
  audit_.min_rate = std::min(audit_.min_rate, send_rate_);
  audit_.min_reference_rate = std::min(audit_.min_reference_rate, reference_rate_);
}

SimTime RateLimiter::earliest_admission(SimTime now) const {
  if (admits(now)) return now;
  auto first = std::upper_bound(send_log_.begin(), send_log_.end(), now - cfg_.delta);
  std::int64_t in_window = send_log_.end() - first;
  // Oldest sends age out one by one; find how many must leave before the
  // count drops strictly below the send rate.
  std::int64_t drop =
      static_cast<std::int64_t>(std::floor(static_cast<double>(in_window) - send_rate_)) + 1;
  drop = std::clamp<std::int64_t>(drop, 1, in_window);
  return *(first + (drop - 1)) + cfg_.delta;
}

}  // namespace rsim
