#include "rsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsim {

SimTime percentile_sorted(const std::vector<SimTime>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample set");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("percentile p must be in (0, 1]");
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  rank = std::max<std::size_t>(1, std::min(rank, sorted.size()));
  return sorted[rank - 1];
}

LatencySummary summarize_latency(std::vector<SimTime> samples) {
  LatencySummary out;
  out.count = samples.size();
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  long double total = 0;
  for (SimTime v : samples) total += static_cast<long double>(v);
  out.mean_ms = static_cast<double>(total / static_cast<long double>(samples.size())) / 1000.0;
  out.p50_ms = to_ms(percentile_sorted(samples, 0.50));
  out.p95_ms = to_ms(percentile_sorted(samples, 0.95));
  out.p99_ms = to_ms(percentile_sorted(samples, 0.99));
  out.p999_ms = to_ms(percentile_sorted(samples, 0.999));
  return out;
}

std::vector<CdfPoint> build_cdf(std::vector<SimTime> samples, double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw std::invalid_argument("keep_fraction must be in (0, 1]");
  }
  std::vector<CdfPoint> out;
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  auto stride = static_cast<std::size_t>(std::llround(1.0 / keep_fraction));
  stride = std::max<std::size_t>(1, stride);
  double n = static_cast<double>(samples.size());
  for (std::size_t i = stride - 1; i < samples.size(); i += stride) {
    out.push_back(CdfPoint{to_ms(samples[i]), static_cast<double>(i + 1) / n});
  }
  if (out.empty() || out.back().cumulative < 1.0) {
    out.push_back(CdfPoint{to_ms(samples.back()), 1.0});
  }
  return out;
}

double fraction_above(const std::vector<SimTime>& samples, SimTime threshold) {
  if (samples.empty()) throw std::invalid_argument("fraction_above of an empty sample set");
  std::uint64_t above = 0;
  for (SimTime v : samples) {
    if (v > threshold) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(samples.size());
}

EstimationErrorReport estimation_error(const std::vector<EstimationSample>& trace,
                                       SimTime freshness_limit) {
  EstimationErrorReport out;
  long double fresh_abs = 0, stale_abs = 0, extrapolated_abs = 0, smoothed_abs = 0;
  for (const EstimationSample& s : trace) {
    // Accuracy is judged only on snapshots where the selecting client has no
    // keys outstanding at the traced server. With outstanding keys the
    // estimate also carries the concurrency compensation (client count times
    // outstanding), which is a deliberate dispersion penalty rather than a
    // queue prediction, and it would swamp the tracking error on both sides.
    if (s.outstanding != 0) continue;
    double err = std::abs(s.estimate - s.true_queue);
    // A client that has never heard from the server has no feedback age to
    // speak of; those snapshots count as stale, not as fresh-by-clock.
    if (s.has_feedback && s.feedback_age <= freshness_limit) {
      ++out.fresh_count;
      fresh_abs += err;
    } else {
      ++out.stale_count;
      stale_abs += err;
    }
    // Estimator replay only makes sense where usable feedback exists.
    if (s.has_feedback && s.service_rate > 0 && s.feedback_age <= freshness_limit) {
      ++out.replay_count;
      double flight_ms = s.response_raw_ms - s.sojourn_ms;
      double extrapolated =
          std::max(0.0, s.feedback_queue + (s.arrival_rate - s.service_rate) * flight_ms);
      extrapolated_abs += std::abs(extrapolated - s.true_queue);
      smoothed_abs += std::abs(1.0 + s.queue_ewma - s.true_queue);
    }
  }
  if (out.fresh_count > 0) out.fresh_mae = static_cast<double>(fresh_abs / out.fresh_count);
  if (out.stale_count > 0) out.stale_mae = static_cast<double>(stale_abs / out.stale_count);
  if (out.replay_count > 0) {
    out.replay_extrapolated_mae = static_cast<double>(extrapolated_abs / out.replay_count);
    out.replay_smoothed_mae = static_cast<double>(smoothed_abs / out.replay_count);
  }
  return out;
}

void merge_audit(RateLimiterAudit& into, const RateLimiterAudit& from) {
  into.min_rate = std::min(into.min_rate, from.min_rate);
  into.min_reference_rate = std::min(into.min_reference_rate, from.min_reference_rate);
  into.min_decrease_gap = std::min(into.min_decrease_gap, from.min_decrease_gap);
  into.decreases += from.decreases;
  into.increases += from.increases;
  into.capped_increases += from.capped_increases;
  into.floor_hits += from.floor_hits;
}

}  // namespace rsim
