#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rsim/rate_limiter.hpp"
#include "rsim/server.hpp"
#include "rsim/strategies.hpp"
#include "rsim/time.hpp"
#include "rsim/workload.hpp"

namespace rsim {

// Everything a run needs. The arrival rate is not set directly: it is
// derived from the target utilization against the cluster's average service
// capacity, so the same utilization knob is comparable across service-time
// settings.
struct Scenario {
  int num_servers = 50;
  int num_clients = 150;
  int num_generators = 200;
  int replication = 3;
  int slot_capacity = 4;

  double base_service_ms = 4.0;
  double range_d = 3.0;  // service-rate ratio between the two regimes
  double fluctuation_interval_ms = 500.0;
  FluctuationMode fluctuation_mode = FluctuationMode::Faster;

  double utilization = 0.70;
  std::optional<SkewSpec> skew;
  std::uint64_t key_budget = 600000;

  StrategyId strategy = StrategyId::Tars;
  int repetitions = 5;
  std::uint64_t base_seed = 1;

  SimTime one_way_latency = 250 * kMicrosecond;
  // Smoothing weight on both client and server side. Responsive enough that
  // a smoothed estimate converges onto a shifted level within a couple of
  // feedback samples, so fresh feedback actually tracks the current queue.
  double sample_weight = 0.5;

  RateLimiterConfig limiter;
  SimTime freshness_limit = 100 * kMillisecond;
  int skip_limit = 6;

  // Reporting knobs.
  SimTime metrics_interval = 10 * kMillisecond;  // backlog occupancy sampling
  bool collect_feedback_age = true;
  std::optional<ServerId> trace_server;
  double cdf_keep_fraction = 0.05;
};

// Mean per-slot service rate in keys/ms, averaged over the two regimes.
double mean_slot_rate(const Scenario& s);
// Cluster-wide arrival rate in keys/ms implied by the utilization target.
double total_arrival_rate(const Scenario& s);

// Throws std::invalid_argument listing every violated constraint.
void validate(const Scenario& s);

// JSON round trip. Unknown keys are rejected so typos cannot silently fall
// back to defaults.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

std::string skew_name(const std::optional<SkewSpec>& skew);

}  // namespace rsim
