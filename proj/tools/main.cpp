#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rsim/csv.hpp"
#include "rsim/harness.hpp"

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void print_table(const rsim::ScenarioResult& result) {
  std::cout << "strategy=" << rsim::strategy_name(result.scenario.strategy)
            << " servers=" << result.scenario.num_servers
            << " clients=" << result.scenario.num_clients
            << " utilization=" << rsim::format_double(result.scenario.utilization)
            << " fluctuation_interval_ms="
            << rsim::format_double(result.scenario.fluctuation_interval_ms)
            << " skew=" << rsim::skew_name(result.scenario.skew) << "\n";
  std::cout << "seed        completed    mean_ms     p50_ms     p95_ms     p99_ms    p999_ms\n";
  auto row = [](const std::string& label, std::uint64_t completed,
                const rsim::LatencySummary& s) {
    std::printf("%-10s %10llu %10.3f %10.3f %10.3f %10.3f %10.3f\n", label.c_str(),
                static_cast<unsigned long long>(completed), s.mean_ms, s.p50_ms, s.p95_ms,
                s.p99_ms, s.p999_ms);
  };
  for (const rsim::RunReport& run : result.runs) {
    row(std::to_string(run.seed), run.completed, run.latency);
  }
  std::uint64_t total = 0;
  for (const rsim::RunReport& run : result.runs) total += run.completed;
  row("mean", total / std::max<std::size_t>(1, result.runs.size()), result.mean);
}

int run_command(const std::string& config_path, const std::optional<std::string>& strategy,
                const std::optional<std::uint64_t>& seed, const std::optional<int>& reps,
                const std::string& out_dir, const std::optional<std::int32_t>& trace_server,
                bool emit_cdf) {
  rsim::Scenario scenario = rsim::load_scenario(config_path);
  if (strategy) scenario.strategy = rsim::parse_strategy(*strategy);
  if (seed) scenario.base_seed = *seed;
  if (reps) scenario.repetitions = *reps;
  if (trace_server) scenario.trace_server = *trace_server;
  rsim::validate(scenario);

  rsim::ScenarioResult result = rsim::run_scenario(scenario);

  fs::create_directories(out_dir);
  {
    auto out = open_output(fs::path(out_dir) / "summary.csv");
    rsim::write_summary_csv(out, scenario, result.runs);
  }
  std::string pooled_note =
      "pooled across " + std::to_string(result.runs.size()) + " runs, seeds " +
      std::to_string(scenario.base_seed) + ".." +
      std::to_string(scenario.base_seed + static_cast<std::uint64_t>(scenario.repetitions) - 1);
  if (emit_cdf) {
    for (const rsim::RunReport& run : result.runs) {
      auto out = open_output(fs::path(out_dir) /
                             ("latency_cdf_seed" + std::to_string(run.seed) + ".csv"));
      rsim::write_cdf_csv(out, "latency_ms",
                          rsim::build_cdf(run.latencies, scenario.cdf_keep_fraction), "");
    }
    {
      auto out = open_output(fs::path(out_dir) / "latency_cdf_pooled.csv");
      rsim::write_cdf_csv(out, "latency_ms",
                          rsim::build_cdf(rsim::pooled_latencies(result.runs),
                                          scenario.cdf_keep_fraction),
                          pooled_note);
    }
    if (scenario.collect_feedback_age) {
      auto out = open_output(fs::path(out_dir) / "feedback_age_cdf_pooled.csv");
      rsim::write_cdf_csv(out, "feedback_age_ms",
                          rsim::build_cdf(rsim::pooled_feedback_ages(result.runs),
                                          scenario.cdf_keep_fraction),
                          pooled_note);
    }
    for (const rsim::RunReport& run : result.runs) {
      auto out = open_output(fs::path(out_dir) /
                             ("backlog_seed" + std::to_string(run.seed) + ".csv"));
      rsim::write_backlog_csv(out, run.backlog_series);
    }
  }
  if (scenario.trace_server) {
    for (const rsim::RunReport& run : result.runs) {
      auto out = open_output(fs::path(out_dir) /
                             ("estimation_trace_seed" + std::to_string(run.seed) + ".csv"));
      rsim::write_estimation_trace_csv(out, run.estimation_trace);
    }
    rsim::EstimationErrorReport err = rsim::estimation_error(
        result.runs.front().estimation_trace, scenario.freshness_limit);
    std::cout << "estimation error on server " << *scenario.trace_server << " (seed "
              << result.runs.front().seed << "): fresh MAE "
              << rsim::format_double(err.fresh_mae) << " over " << err.fresh_count
              << " samples, stale MAE " << rsim::format_double(err.stale_mae) << " over "
              << err.stale_count << " samples\n";
  }

  print_table(result);
  std::cout << "wrote " << (fs::path(out_dir) / "summary.csv").string() << "\n";
  return 0;
}

int presets_command(bool list, const std::optional<std::string>& emit,
                    const std::optional<std::string>& out_path) {
  auto presets = rsim::scenario_presets();
  if (list || !emit) {
    for (const auto& [name, scenario] : presets) {
      std::cout << name << "\n";
      (void)scenario;
    }
    return 0;
  }
  for (const auto& [name, scenario] : presets) {
    if (name != *emit) continue;
    std::string text = rsim::scenario_to_json(scenario);
    if (out_path) {
      auto out = open_output(*out_path);
      out << text;
    } else {
      std::cout << text;
    }
    return 0;
  }
  std::cerr << "unknown preset '" << *emit << "'; use --list to see the names\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of replica selection for a replicated key-value store"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario from a config file");
  std::string config_path;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string out_dir = "out";
  std::optional<std::int32_t> trace_server;
  bool emit_cdf = false;
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--strategy", strategy,
                  "Override the strategy: c3, tars, oracle_c3rc, oracle_tarsrc, trr, random, lor");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--reps", reps, "Override the repetition count");
  run->add_option("--out", out_dir, "Output directory (default: out)");
  run->add_option("--trace-server", trace_server,
                  "Record queue-estimation samples for this server");
  run->add_flag("--emit-cdf", emit_cdf, "Also write latency / feedback-age CDFs and backlog series");

  auto* presets = app.add_subcommand("presets", "List or emit ready-made scenario configs");
  bool list = false;
  std::optional<std::string> emit;
  std::optional<std::string> preset_out;
  presets->add_flag("--list", list, "List preset names");
  presets->add_option("--emit", emit, "Write the named preset as JSON");
  presets->add_option("--out", preset_out, "File to write the preset to (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, strategy, seed, reps, out_dir, trace_server, emit_cdf);
    }
    return presets_command(list, emit, preset_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
