#include <benchmark/benchmark.h>

#include <vector>

#include "rsim/event_queue.hpp"
#include "rsim/rate_limiter.hpp"
#include "rsim/rng.hpp"
#include "rsim/simulation.hpp"
#include "rsim/strategies.hpp"

using namespace rsim;

namespace {

void bm_event_queue_churn(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    EventQueue q;
    RngStream rng(1, "bench/queue");
    state.ResumeTiming();
    for (int i = 0; i < depth; ++i) {
      Event ev;
      ev.fire_at = static_cast<SimTime>(rng.uniform_int(1000000));
      ev.kind = EventKind::KeyGenerated;
      ev.actor = i;
      q.schedule(ev);
    }
    while (auto ev = q.pop_next()) benchmark::DoNotOptimize(ev->fire_at);
  }
  state.SetItemsProcessed(state.iterations() * depth);
}

void bm_score_tars(benchmark::State& state) {
  StrategyParams p;
  ScoreInput in;
  in.has_feedback = true;
  in.feedback_age = 40 * kMillisecond;
  in.feedback.queue_length = 5.0;
  in.feedback.arrival_rate = 1.2;
  in.feedback.service_rate = 1.0;
  in.feedback.sojourn_time = 5 * kMillisecond;
  in.response_raw_ms = 6.0;
  in.outstanding = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_tars(in, p));
    in.feedback.queue_length += 0.001;  // defeat constant folding
  }
}

void bm_score_c3(benchmark::State& state) {
  StrategyParams p;
  ScoreInput in;
  in.queue_ewma = 3.0;
  in.outstanding = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_c3(in, p));
    in.queue_ewma += 0.001;
  }
}

void bm_rank_group(benchmark::State& state) {
  StrategyParams p;
  RngStream rng(3, "bench/rank");
  std::vector<ServerId> group = {0, 1, 2};
  std::vector<ScoreInput> inputs(3);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i].has_feedback = true;
    inputs[i].feedback.service_rate = 0.8 + 0.1 * static_cast<double>(i);
    inputs[i].feedback.queue_length = static_cast<double>(i);
    inputs[i].response_raw_ms = 5.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_candidates(RankingKind::Tars, group, inputs, p, rng));
  }
}

void bm_limiter_feedback(benchmark::State& state) {
  RateLimiterConfig cfg;
  RateLimiter lim(cfg, RateControlMode::QueueFeedback, 0);
  Feedback fb;
  SimTime now = 0;
  for (auto _ : state) {
    now += 500;
    fb.queue_length = static_cast<double>(now % 11);
    lim.record_send(now);
    lim.record_receipt(now);
    lim.on_feedback(fb, now);
    benchmark::DoNotOptimize(lim.send_rate());
  }
}

void bm_small_run(benchmark::State& state) {
  Scenario s;
  s.num_servers = 10;
  s.num_clients = 15;
  s.num_generators = 20;
  s.fluctuation_interval_ms = 50.0;
  s.key_budget = static_cast<std::uint64_t>(state.range(0));
  s.strategy = StrategyId::Tars;
  s.collect_feedback_age = false;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    RunReport r = Simulation(s, seed++).run();
    benchmark::DoNotOptimize(r.completed);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(bm_event_queue_churn)->Arg(1000)->Arg(10000);
BENCHMARK(bm_score_tars);
BENCHMARK(bm_score_c3);
BENCHMARK(bm_rank_group);
BENCHMARK(bm_limiter_feedback);
BENCHMARK(bm_small_run)->Unit(benchmark::kMillisecond)->Arg(2000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
