#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "rsim/feedback.hpp"
#include "rsim/rate_limiter.hpp"
#include "rsim/rng.hpp"
#include "rsim/strategies.hpp"
#include "rsim/time.hpp"

namespace rsim {

// What one client believes about one server, maintained purely from the
// values that came back from it.
struct ReplicaView {
  double queue_ewma = 0.0;
  double service_ewma_ms = 0.0;
  double response_ewma_ms = 0.0;
  double response_raw_ms = 0.0;
  int outstanding = 0;
  int not_selected = 0;
  bool has_feedback = false;
  Feedback feedback;
  SimTime feedback_received_at = 0;
};

struct ClientConfig {
  int num_servers = 50;
  double base_service_ms = 4.0;
  SimTime one_way_latency = 250 * kMicrosecond;
  double sample_weight = 0.5;  // client-side smoothing for q, T, R
  StrategyParams params;
  RankingKind ranking = RankingKind::C3;
  RateControlMode rate_mode = RateControlMode::SendReceive;
  RateLimiterConfig limiter;
};

// A client keeps a view and a send limiter per server, plus a FIFO backlog of
// keys it could not send because every candidate limiter was closed.
class Client {
 public:
  Client(ClientId id, const ClientConfig& cfg, std::uint64_t seed);

  // Snapshot of the selection inputs for a replica group; feedback age is
  // measured at `now`. Oracle fields are left for the caller to fill.
  std::vector<ScoreInput> selection_inputs(const std::vector<ServerId>& group,
                                           SimTime now) const;

  // Ranks the candidates and picks the best one whose limiter admits. Every
  // candidate that is not chosen has its not-selected count bumped; the
  // chosen server gains an outstanding key and a send-log entry. Returns
  // nothing when every limiter is closed.
  std::optional<ServerId> try_choose(const std::vector<ServerId>& group,
                                     const std::vector<ScoreInput>& inputs, SimTime now);

  // Folds a returned value into the view of the server that sent it and runs
  // the limiter's rate adjustment.
  void on_value(ServerId server, const Feedback& fb, SimTime sent_at, SimTime now);

  void backlog_push(KeyId key) { backlog_.push_back(key); }
  void backlog_pop_front() { backlog_.pop_front(); }
  std::optional<KeyId> backlog_front() const {
    if (backlog_.empty()) return std::nullopt;
    return backlog_.front();
  }
  std::size_t backlog_size() const { return backlog_.size(); }

  // Earliest time any of the group's limiters would admit again.
  SimTime earliest_retry(const std::vector<ServerId>& group, SimTime now) const;

  ClientId id() const { return id_; }
  const ReplicaView& view(ServerId s) const { return views_[static_cast<std::size_t>(s)]; }
  const RateLimiter& limiter(ServerId s) const {
    return limiters_[static_cast<std::size_t>(s)];
  }
  const StrategyParams& params() const { return cfg_.params; }
  RankingKind ranking() const { return cfg_.ranking; }
  int total_outstanding() const;

 private:
  ClientId id_;
  ClientConfig cfg_;
  std::vector<ReplicaView> views_;
  std::vector<RateLimiter> limiters_;
  std::deque<KeyId> backlog_;
  RngStream rng_;  // random baseline scores
};

}  // namespace rsim
