#include "rsim/client.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace rsim {

Client::Client(ClientId id, const ClientConfig& cfg, std::uint64_t seed)
    : id_(id), cfg_(cfg), rng_(seed, "baseline/c" + std::to_string(id)) {
  views_.resize(static_cast<std::size_t>(cfg.num_servers));
  double rtt_ms = 2.0 * to_ms(cfg.one_way_latency) + cfg.base_service_ms;
  for (ReplicaView& v : views_) {
    v.service_ewma_ms = cfg.base_service_ms;
    v.response_ewma_ms = rtt_ms;
    v.response_raw_ms = rtt_ms;
    // Placeholder feedback so the stale-score path has sane raw values before
    // the first response arrives.
    v.feedback.service_time = from_ms(cfg.base_service_ms);
    v.feedback.sojourn_time = from_ms(cfg.base_service_ms);
    v.feedback_received_at = 0;
  }
  limiters_.reserve(views_.size());
  for (int s = 0; s < cfg.num_servers; ++s) {
    limiters_.emplace_back(cfg.limiter, cfg.rate_mode, 0);
  }
}

std::vector<ScoreInput> Client::selection_inputs(const std::vector<ServerId>& group,
                                                 SimTime now) const {
  std::vector<ScoreInput> inputs;
  inputs.reserve(group.size());
  for (ServerId s : group) {
    const ReplicaView& v = views_[static_cast<std::size_t>(s)];
    ScoreInput in;
    in.queue_ewma = v.queue_ewma;
    in.service_ewma_ms = v.service_ewma_ms;
    in.response_ewma_ms = v.response_ewma_ms;
    in.response_raw_ms = v.response_raw_ms;
    in.outstanding = v.outstanding;
    in.not_selected = v.not_selected;
    in.has_feedback = v.has_feedback;
    in.feedback = v.feedback;
    in.feedback_age = now - v.feedback_received_at;
    inputs.push_back(in);
  }
  return inputs;
}

std::optional<ServerId> Client::try_choose(const std::vector<ServerId>& group,
                                           const std::vector<ScoreInput>& inputs,
                                           SimTime now) {
  std::vector<RankedCandidate> ranked =
      rank_candidates(cfg_.ranking, group, inputs, cfg_.params, rng_);
  std::optional<ServerId> chosen;
  for (const RankedCandidate& rc : ranked) {
    if (limiters_[static_cast<std::size_t>(rc.server)].admits(now)) {
      chosen = rc.server;
      break;
    }
  }
  for (ServerId s : group) {
    if (chosen && s == *chosen) continue;
    ++views_[static_cast<std::size_t>(s)].not_selected;
  }
  if (chosen) {
    ++views_[static_cast<std::size_t>(*chosen)].outstanding;
    limiters_[static_cast<std::size_t>(*chosen)].record_send(now);
  }
  return chosen;
}

void Client::on_value(ServerId server, const Feedback& fb, SimTime sent_at, SimTime now) {
  ReplicaView& v = views_[static_cast<std::size_t>(server)];
  if (v.outstanding <= 0) {
    throw std::logic_error("client " + std::to_string(id_) + " received a value from server " +
                           std::to_string(server) + " with no key outstanding");
  }
  --v.outstanding;
  double w = cfg_.sample_weight;
  double response_ms = to_ms(now - sent_at);
  v.response_raw_ms = response_ms;
  v.response_ewma_ms = (1.0 - w) * v.response_ewma_ms + w * response_ms;
  v.queue_ewma = (1.0 - w) * v.queue_ewma + w * fb.queue_length;
  v.service_ewma_ms = (1.0 - w) * v.service_ewma_ms + w * to_ms(fb.service_time);
  v.feedback = fb;
  v.feedback_received_at = now;
  v.has_feedback = true;
  v.not_selected = 0;
  RateLimiter& lim = limiters_[static_cast<std::size_t>(server)];
  lim.record_receipt(now);
  lim.on_feedback(fb, now);
}

SimTime Client::earliest_retry(const std::vector<ServerId>& group, SimTime now) const {
  SimTime earliest = std::numeric_limits<SimTime>::max();
  for (ServerId s : group) {
    earliest = std::min(earliest, limiters_[static_cast<std::size_t>(s)].earliest_admission(now));
  }
  return earliest;
}

int Client::total_outstanding() const {
  int total = 0;
  for (const ReplicaView& v : views_) total += v.outstanding;
  return total;
}

}  // namespace rsim
