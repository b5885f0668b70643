#include "rsim/harness.hpp"

#include <algorithm>
#include <cmath>

#include "rsim/simulation.hpp"

namespace rsim {

RunReport run_single(const Scenario& scenario, std::uint64_t seed) {
  Simulation sim(scenario, seed);
  return sim.run();
}

ScenarioResult run_scenario(const Scenario& scenario) {
  validate(scenario);
  ScenarioResult result;
  result.scenario = scenario;
  result.runs.reserve(static_cast<std::size_t>(scenario.repetitions));
  for (int i = 0; i < scenario.repetitions; ++i) {
    result.runs.push_back(run_single(scenario, scenario.base_seed + static_cast<std::uint64_t>(i)));
  }
  result.mean = mean_summary(result.runs);
  return result;
}

LatencySummary mean_summary(const std::vector<RunReport>& runs) {
  LatencySummary mean;
  if (runs.empty()) return mean;
  for (const RunReport& run : runs) {
    mean.count += run.latency.count;
    mean.mean_ms += run.latency.mean_ms;
    mean.p50_ms += run.latency.p50_ms;
    mean.p95_ms += run.latency.p95_ms;
    mean.p99_ms += run.latency.p99_ms;
    mean.p999_ms += run.latency.p999_ms;
  }
  double n = static_cast<double>(runs.size());
  mean.mean_ms /= n;
  mean.p50_ms /= n;
  mean.p95_ms /= n;
  mean.p99_ms /= n;
  mean.p999_ms /= n;
  return mean;
}

std::vector<SimTime> pooled_feedback_ages(const std::vector<RunReport>& runs) {
  std::vector<SimTime> pooled;
  for (const RunReport& run : runs) {
    pooled.insert(pooled.end(), run.feedback_ages.begin(), run.feedback_ages.end());
  }
  return pooled;
}

std::vector<SimTime> pooled_latencies(const std::vector<RunReport>& runs) {
  std::vector<SimTime> pooled;
  for (const RunReport& run : runs) {
    pooled.insert(pooled.end(), run.latencies.begin(), run.latencies.end());
  }
  return pooled;
}

double pooled_fraction_above(const std::vector<RunReport>& runs, SimTime threshold) {
  return fraction_above(pooled_feedback_ages(runs), threshold);
}

std::vector<std::pair<std::string, Scenario>> scenario_presets() {
  std::vector<std::pair<std::string, Scenario>> presets;

  const double intervals[] = {10.0, 50.0, 100.0, 500.0};
  const int clients[] = {150, 300};
  const double utils[] = {0.45, 0.70};
  struct SkewChoice {
    const char* name;
    std::optional<SkewSpec> spec;
  };
  const SkewChoice skews[] = {
      {"uniform", std::nullopt},
      {"skew2080", SkewSpec{0.2, 0.8}},
      {"skew5080", SkewSpec{0.5, 0.8}},
  };

  for (double t : intervals) {
    for (int n : clients) {
      for (double u : utils) {
        for (const SkewChoice& sk : skews) {
          Scenario s;
          s.fluctuation_interval_ms = t;
          s.num_clients = n;
          s.utilization = u;
          s.skew = sk.spec;
          std::string name = "t" + std::to_string(static_cast<int>(t)) + "-n" +
                             std::to_string(n) + "-u" +
                             std::to_string(static_cast<int>(std::llround(u * 100))) + "-" +
                             sk.name;
          presets.emplace_back(name, s);
        }
      }
    }
  }

  // A fast smoke configuration: same defaults, a tenth of the keys.
  Scenario quick;
  quick.key_budget = 100000;
  quick.repetitions = 3;
  presets.emplace_back("quick", quick);

  return presets;
}

}  // namespace rsim
