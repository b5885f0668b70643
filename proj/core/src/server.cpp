#include "rsim/server.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsim {

double RateMeter::measure(SimTime length, std::uint64_t count, bool combine_previous,
                          double sample_weight) {
  SimTime span = length;
  std::uint64_t events = count;
  if (combine_previous) {
    span += prev_length_;
    events += prev_count_;
  }
  prev_length_ = length;
  prev_count_ = count;
  if (span <= 0) return ewma_;  // degenerate window, keep the current estimate
  double sample = static_cast<double>(events) / to_ms(span);
  if (!seeded_) {
    ewma_ = sample;
    seeded_ = true;
  } else {
    ewma_ = (1.0 - sample_weight) * ewma_ + sample_weight * sample;
  }
  return ewma_;
}

Server::Server(ServerId id, const ServerConfig& cfg)
    : id_(id), cfg_(cfg), current_mean_ms_(cfg.base_service_ms) {
  if (cfg.slot_capacity < 1) throw std::invalid_argument("slot_capacity must be >= 1");
  if (cfg.base_service_ms <= 0) throw std::invalid_argument("base_service_ms must be > 0");
  if (cfg.range_d < 1.0) throw std::invalid_argument("range_d must be >= 1");
  in_service_.reserve(static_cast<std::size_t>(cfg.slot_capacity));
}

SimTime Server::draw_service_time(RngStream& service_rng) const {
  double us = service_rng.exponential(current_mean_ms_) * 1000.0;
  return std::max<SimTime>(1, std::llround(us));
}

Server::Started Server::start_service(KeyId key, SimTime arrived, SimTime now,
                                      RngStream& service_rng) {
  InService entry;
  entry.key = key;
  entry.arrived = arrived;
  entry.service_start = now;
  entry.mu_total_at_start = mu_meter_.total();
  entry.lambda_total_at_start = lambda_meter_.total();
  in_service_.push_back(entry);
  return Started{key, draw_service_time(service_rng)};
}

std::optional<Server::Started> Server::on_key_arrival(KeyId key, SimTime now,
                                                      RngStream& service_rng) {
  lambda_meter_.record();
  if (busy_slots() < cfg_.slot_capacity) {
    return start_service(key, now, now, service_rng);
  }
  queue_.push_back(Waiting{key, now});
  return std::nullopt;
}

Server::Completion Server::on_service_complete(KeyId key, SimTime now,
                                               RngStream& service_rng) {
  auto it = std::find_if(in_service_.begin(), in_service_.end(),
                         [key](const InService& e) { return e.key == key; });
  if (it == in_service_.end()) {
    throw std::logic_error("service completion for key " + std::to_string(key) +
                           " that is not in service at server " + std::to_string(id_));
  }
  InService entry = *it;
  in_service_.erase(it);

  // Rate samples over this key's service window; the completing key itself is
  // not yet recorded, so it does not count toward its own window.
  SimTime window = now - entry.service_start;
  std::uint64_t mu_count = mu_meter_.total() - entry.mu_total_at_start;
  std::uint64_t lambda_count = lambda_meter_.total() - entry.lambda_total_at_start;
  bool combine = mu_count == 0;
  double mu = mu_meter_.measure(window, mu_count, combine, cfg_.rate_sample_weight);
  double lambda =
      lambda_meter_.measure(window, lambda_count, combine, cfg_.rate_sample_weight);
  mu_meter_.record();

  Completion result;
  if (!queue_.empty()) {
    Waiting next = queue_.front();
    queue_.pop_front();
    result.next = start_service(next.key, next.arrived, now, service_rng);
  }
  result.feedback.queue_length = static_cast<double>(queue_.size());
  result.feedback.service_time = window;
  result.feedback.arrival_rate = lambda;
  result.feedback.service_rate = mu;
  result.feedback.sojourn_time = now - entry.arrived;
  return result;
}

void Server::on_fluctuation_tick(RngStream& fluct_rng) {
  bool boosted = fluct_rng.bernoulli(0.5);
  if (cfg_.mode == FluctuationMode::Faster) {
    current_mean_ms_ = boosted ? cfg_.base_service_ms / cfg_.range_d : cfg_.base_service_ms;
  } else {
    current_mean_ms_ = boosted ? cfg_.base_service_ms * cfg_.range_d : cfg_.base_service_ms;
  }
}

}  // namespace rsim
