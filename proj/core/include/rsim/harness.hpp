#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rsim/config.hpp"
#include "rsim/metrics.hpp"

namespace rsim {

struct ScenarioResult {
  Scenario scenario;
  std::vector<RunReport> runs;
  LatencySummary mean;  // per-metric mean across the runs
};

RunReport run_single(const Scenario& scenario, std::uint64_t seed);

// Runs `repetitions` seeds starting at base_seed and aggregates them.
ScenarioResult run_scenario(const Scenario& scenario);

LatencySummary mean_summary(const std::vector<RunReport>& runs);

// Feedback-age samples pooled across runs; fraction strictly above the limit.
double pooled_fraction_above(const std::vector<RunReport>& runs, SimTime threshold);
std::vector<SimTime> pooled_feedback_ages(const std::vector<RunReport>& runs);
std::vector<SimTime> pooled_latencies(const std::vector<RunReport>& runs);

// Named ready-made scenarios: the full evaluation grid over fluctuation
// interval {10,50,100,500} ms, client count {150,300}, utilization
// {0.45,0.70}, and skew {none,20/80,50/80}, plus a scaled-down "quick" entry
// for smoke checks.
std::vector<std::pair<std::string, Scenario>> scenario_presets();

}  // namespace rsim
