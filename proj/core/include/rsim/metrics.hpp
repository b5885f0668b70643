#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rsim/rate_limiter.hpp"
#include "rsim/time.hpp"

namespace rsim {

// Nearest-rank percentile: the ceil(p * N)-th smallest sample. `sorted` must
// be non-empty and ascending; p lies in (0, 1].
SimTime percentile_sorted(const std::vector<SimTime>& sorted, double p);

struct LatencySummary {
  std::uint64_t count = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double p999_ms = 0.0;
};

// Sorts a copy of the samples and summarizes it.
LatencySummary summarize_latency(std::vector<SimTime> samples);

struct CdfPoint {
  double value_ms = 0.0;
  double cumulative = 0.0;
};

// Empirical CDF, thinned to roughly `keep_fraction` of the points; the last
// point (cumulative = 1) is always kept.
std::vector<CdfPoint> build_cdf(std::vector<SimTime> samples, double keep_fraction);

// Fraction of samples strictly greater than the threshold.
double fraction_above(const std::vector<SimTime>& samples, SimTime threshold);

// One selection-time observation of the traced server.
struct EstimationSample {
  SimTime at = 0;
  SimTime feedback_age = 0;
  double true_queue = 0.0;
  double estimate = 0.0;        // the running strategy's queue estimate
  double feedback_queue = 0.0;  // raw queue length in the last feedback
  int outstanding = 0;
  double queue_ewma = 0.0;
  double arrival_rate = 0.0;
  double service_rate = 0.0;
  double response_raw_ms = 0.0;
  double sojourn_ms = 0.0;
  bool has_feedback = false;
};

struct EstimationErrorReport {
  std::uint64_t fresh_count = 0;
  std::uint64_t stale_count = 0;
  double fresh_mae = 0.0;  // strategy estimate vs true queue, fresh feedback
  double stale_mae = 0.0;  // same, stale feedback
  // Replays of two estimators on the same fresh-feedback rows:
  // the reported queue extrapolated by the rate imbalance over the feedback
  // flight time, and the plain smoothed "one plus EWMA" estimate.
  double replay_extrapolated_mae = 0.0;
  double replay_smoothed_mae = 0.0;
  std::uint64_t replay_count = 0;
};

EstimationErrorReport estimation_error(const std::vector<EstimationSample>& trace,
                                       SimTime freshness_limit);

// Per-run output of the simulator.
struct RunReport {
  std::uint64_t seed = 0;
  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  SimTime duration = 0;
  LatencySummary latency;
  double throughput_per_ms = 0.0;
  std::vector<SimTime> latencies;      // generation to value arrival
  std::vector<SimTime> feedback_ages;  // per candidate, at every selection
  std::vector<EstimationSample> estimation_trace;
  std::vector<std::pair<SimTime, std::uint64_t>> backlog_series;
  std::uint64_t backlog_peak = 0;
  std::uint64_t backlogged_keys = 0;  // keys that waited at least once
  std::uint64_t retry_events = 0;
  std::uint64_t final_backlog = 0;
  std::uint64_t final_outstanding = 0;
  RateLimiterAudit audit;  // merged across every limiter in the run
  std::uint64_t trace_digest = 0;
};

void merge_audit(RateLimiterAudit& into, const RateLimiterAudit& from);

}  // namespace rsim
