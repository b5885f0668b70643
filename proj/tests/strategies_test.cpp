#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rsim/rng.hpp"
#include "rsim/strategies.hpp"

using namespace rsim;

namespace {

StrategyParams small_params() {
  StrategyParams p;
  p.client_count = 10;
  return p;
}

ScoreInput fresh_input() {
  ScoreInput in;
  in.has_feedback = true;
  in.feedback_age = 10 * kMillisecond;
  in.feedback.queue_length = 4.0;
  in.feedback.arrival_rate = 0.9;
  in.feedback.service_rate = 0.75;
  in.feedback.sojourn_time = 6 * kMillisecond;
  in.response_raw_ms = 8.0;
  return in;
}

// Transliteration of the published selection rules, written independently of
// the library so a structural slip in either copy shows up as a mismatch.
double reference_tars_estimate(const ScoreInput& in, const StrategyParams& p) {
  bool stale = !in.has_feedback || in.feedback.service_rate <= 0.0 ||
               in.feedback_age > p.freshness_limit;
  if (stale) {
    if (in.outstanding == 0 && (in.not_selected == 0 || in.not_selected > p.skip_limit)) {
      return 0.0;
    }
    return 1.0 + in.queue_ewma + static_cast<double>(in.outstanding) * p.client_count;
  }
  double flight = in.response_raw_ms - to_ms(in.feedback.sojourn_time);
  double q = in.feedback.queue_length +
             (in.feedback.arrival_rate - in.feedback.service_rate) * flight +
             static_cast<double>(in.outstanding) * p.client_count;
  return q < 0.0 ? 0.0 : q;
}

}  // namespace

TEST_CASE("strategy table: ranking and rate-control pairings") {
  CHECK(ranking_kind(StrategyId::C3) == RankingKind::C3);
  CHECK(ranking_kind(StrategyId::Tars) == RankingKind::Tars);
  CHECK(ranking_kind(StrategyId::Trr) == RankingKind::Tars);
  CHECK(ranking_kind(StrategyId::OracleC3Rc) == RankingKind::Oracle);
  CHECK(ranking_kind(StrategyId::OracleTarsRc) == RankingKind::Oracle);

  CHECK(rate_control_mode(StrategyId::C3) == RateControlMode::SendReceive);
  CHECK(rate_control_mode(StrategyId::Trr) == RateControlMode::SendReceive);
  CHECK(rate_control_mode(StrategyId::OracleC3Rc) == RateControlMode::SendReceive);
  CHECK(rate_control_mode(StrategyId::Tars) == RateControlMode::QueueFeedback);
  CHECK(rate_control_mode(StrategyId::OracleTarsRc) == RateControlMode::QueueFeedback);
  CHECK(rate_control_mode(StrategyId::Random) == RateControlMode::None);
  CHECK(rate_control_mode(StrategyId::LeastOutstanding) == RateControlMode::None);

  for (StrategyId id : all_strategies()) {
    CHECK(parse_strategy(strategy_name(id)) == id);
  }
  CHECK_THROWS_AS(parse_strategy("nope"), std::invalid_argument);
}

TEST_CASE("smoothed-queue score: hand-computed values") {
  StrategyParams p = small_params();
  ScoreInput in;
  in.queue_ewma = 2.0;
  in.outstanding = 0;
  in.service_ewma_ms = 4.0;
  in.response_ewma_ms = 5.0;
  // queue estimate 1 + 2 = 3; score 5 - 4 + 27 * 4 = 109
  CHECK(queue_estimate_c3(in, p) == doctest::Approx(3.0));
  CHECK(score_c3(in, p) == doctest::Approx(109.0));

  in.outstanding = 2;
  CHECK(queue_estimate_c3(in, p) == doctest::Approx(23.0));  // 1 + 2 + 2*10
}

TEST_CASE("smoothed-queue score rises steeply with outstanding keys") {
  StrategyParams p = small_params();
  ScoreInput in;
  in.queue_ewma = 1.0;
  double prev = score_c3(in, p);
  for (int os = 1; os <= 5; ++os) {
    in.outstanding = os;
    double cur = score_c3(in, p);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("timeliness-aware estimate: fresh feedback extrapolates the queue") {
  StrategyParams p = small_params();
  ScoreInput in = fresh_input();
  // flight = 8 - 6 = 2 ms; 4 + (0.9 - 0.75) * 2 = 4.3
  CHECK(queue_estimate_tars(in, p) == doctest::Approx(4.3));
  // score = 2 + 4.3^3 / 0.75
  CHECK(score_tars(in, p) == doctest::Approx(2.0 + 4.3 * 4.3 * 4.3 / 0.75));

  in.outstanding = 1;
  CHECK(queue_estimate_tars(in, p) == doctest::Approx(14.3));
}

TEST_CASE("timeliness-aware estimate clamps a draining queue at zero") {
  StrategyParams p = small_params();
  ScoreInput in = fresh_input();
  in.feedback.queue_length = 1.0;
  in.feedback.arrival_rate = 0.1;
  in.feedback.service_rate = 1.0;
  // 1 + (0.1 - 1.0) * 2 = -0.8, clamped
  CHECK(queue_estimate_tars(in, p) == doctest::Approx(0.0));
  CHECK(score_tars(in, p) == doctest::Approx(2.0));  // just the flight delay
}

TEST_CASE("timeliness-aware estimate: stale rules") {
  StrategyParams p = small_params();
  ScoreInput in = fresh_input();
  in.feedback_age = 150 * kMillisecond;
  in.queue_ewma = 3.0;

  SUBCASE("idle and never skipped counts as empty") {
    in.outstanding = 0;
    in.not_selected = 0;
    CHECK(queue_estimate_tars(in, p) == doctest::Approx(0.0));
  }
  SUBCASE("skipped past the limit counts as empty again") {
    in.outstanding = 0;
    in.not_selected = 7;
    CHECK(queue_estimate_tars(in, p) == doctest::Approx(0.0));
  }
  SUBCASE("a few skips fall back to the smoothed queue") {
    in.outstanding = 0;
    in.not_selected = 3;
    CHECK(queue_estimate_tars(in, p) == doctest::Approx(4.0));  // 1 + 3
  }
  SUBCASE("outstanding keys always keep the concurrency term") {
    in.outstanding = 2;
    in.not_selected = 0;
    CHECK(queue_estimate_tars(in, p) == doctest::Approx(24.0));  // 1 + 3 + 2*10
  }
  SUBCASE("stale score falls back to the smoothed service rate") {
    in.outstanding = 0;
    in.not_selected = 3;
    in.service_ewma_ms = 4.0;
    // mu = 1/4; score = 8 - 6 + 4^3 * 4
    CHECK(score_tars(in, p) == doctest::Approx(2.0 + 64.0 * 4.0));
  }
}

TEST_CASE("feedback exactly at the freshness limit still counts as fresh") {
  StrategyParams p = small_params();
  ScoreInput in = fresh_input();
  in.queue_ewma = 50.0;   // only the stale path would see this
  in.not_selected = 1;    // keeps the stale path off its zero-queue cases

  in.feedback_age = p.freshness_limit;
  CHECK(queue_estimate_tars(in, p) == doctest::Approx(4.3));
  in.feedback_age = p.freshness_limit + 1;
  CHECK(queue_estimate_tars(in, p) == doctest::Approx(51.0));  // 1 + 50
}

TEST_CASE("missing feedback or a dead rate estimate forces the stale path") {
  StrategyParams p = small_params();

  ScoreInput no_fb = fresh_input();
  no_fb.has_feedback = false;
  no_fb.queue_ewma = 2.0;
  no_fb.not_selected = 1;
  CHECK(queue_estimate_tars(no_fb, p) == doctest::Approx(3.0));

  ScoreInput dead_mu = fresh_input();
  dead_mu.feedback.service_rate = 0.0;
  dead_mu.feedback_age = 0;  // age alone would say fresh
  dead_mu.queue_ewma = 2.0;
  dead_mu.not_selected = 1;
  CHECK(queue_estimate_tars(dead_mu, p) == doctest::Approx(3.0));
}

TEST_CASE("fresh path ignores the client-side smoothed values") {
  StrategyParams p = small_params();
  ScoreInput a = fresh_input();
  ScoreInput b = a;
  b.queue_ewma = 99.0;
  b.service_ewma_ms = 77.0;
  b.response_ewma_ms = 55.0;
  b.not_selected = 5;
  CHECK(queue_estimate_tars(a, p) == queue_estimate_tars(b, p));
  CHECK(score_tars(a, p) == score_tars(b, p));
}

TEST_CASE("randomized inputs agree with a transliterated reference") {
  StrategyParams p;
  p.client_count = 150;
  RngStream rng(7, "tars-branches");
  for (int i = 0; i < 20000; ++i) {
    ScoreInput in;
    in.has_feedback = rng.bernoulli(0.9);
    in.feedback_age = static_cast<SimTime>(rng.uniform_int(200 * kMillisecond));
    in.outstanding = static_cast<int>(rng.uniform_int(4));
    in.not_selected = static_cast<int>(rng.uniform_int(10));
    in.queue_ewma = rng.uniform01() * 8.0;
    in.feedback.queue_length = rng.uniform01() * 10.0;
    in.feedback.arrival_rate = rng.uniform01() * 2.0;
    in.feedback.service_rate = rng.bernoulli(0.05) ? 0.0 : rng.uniform01() * 2.0;
    in.feedback.sojourn_time = static_cast<SimTime>(rng.uniform_int(10 * kMillisecond));
    in.response_raw_ms = to_ms(in.feedback.sojourn_time) + rng.uniform01();
    double got = queue_estimate_tars(in, p);
    double want = reference_tars_estimate(in, p);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("fresh estimate is monotone in the reported queue and the imbalance") {
  StrategyParams p = small_params();
  ScoreInput in = fresh_input();
  double base = queue_estimate_tars(in, p);

  ScoreInput longer_queue = in;
  longer_queue.feedback.queue_length += 2.0;
  CHECK(queue_estimate_tars(longer_queue, p) > base);

  ScoreInput hotter = in;
  hotter.feedback.arrival_rate += 0.5;
  CHECK(queue_estimate_tars(hotter, p) > base);

  ScoreInput busier = in;
  busier.outstanding += 1;
  CHECK(queue_estimate_tars(busier, p) > base);
}

TEST_CASE("oracle score is the true queue over the true rate") {
  ScoreInput in;
  in.true_queue = 6.0;
  in.true_rate = 1.0;
  CHECK(score_oracle(in) == doctest::Approx(6.0));
  in.true_rate = 3.0;
  CHECK(score_oracle(in) == doctest::Approx(2.0));
}

TEST_CASE("ranking sorts ascending and breaks ties by server id") {
  StrategyParams p = small_params();
  RngStream rng(1, "rank");
  std::vector<ServerId> servers = {4, 7, 9};
  std::vector<ScoreInput> inputs(3);
  inputs[0].outstanding = 2;
  inputs[1].outstanding = 0;
  inputs[2].outstanding = 1;
  auto ranked = rank_candidates(RankingKind::LeastOutstanding, servers, inputs, p, rng);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].server == 7);
  CHECK(ranked[1].server == 9);
  CHECK(ranked[2].server == 4);

  std::vector<ScoreInput> tied(3);
  auto tie = rank_candidates(RankingKind::LeastOutstanding, servers, tied, p, rng);
  CHECK(tie[0].server == 4);
  CHECK(tie[1].server == 7);
  CHECK(tie[2].server == 9);
}

TEST_CASE("oracle ranking orders by drain time and keeps group order on ties") {
  StrategyParams p = small_params();
  RngStream rng(1, "rank");
  std::vector<ServerId> servers = {4, 7, 9};
  std::vector<ScoreInput> inputs(3);
  inputs[0].true_queue = 1.0;  // score 1.0 at rate 1.0
  inputs[0].true_rate = 1.0;
  inputs[1].true_queue = 6.0;  // score 2.0 at rate 3.0
  inputs[1].true_rate = 3.0;
  inputs[2].true_queue = 9.0;  // score 3.0
  inputs[2].true_rate = 3.0;
  auto scored = rank_candidates(RankingKind::Oracle, servers, inputs, p, rng);
  REQUIRE(scored.size() == 3);
  CHECK(scored[0].server == 4);
  CHECK(scored[1].server == 7);
  CHECK(scored[2].server == 9);

  for (auto& in : inputs) in.true_queue = 0.0;  // all scores tie at zero
  auto tied = rank_candidates(RankingKind::Oracle, servers, inputs, p, rng);
  CHECK(tied[0].server == 4);
  CHECK(tied[1].server == 7);
  CHECK(tied[2].server == 9);
}

TEST_CASE("random ranking is deterministic per stream and roughly uniform") {
  StrategyParams p;
  std::vector<ServerId> servers = {0, 1, 2};
  std::vector<ScoreInput> inputs(3);

  RngStream a(42, "random-rank");
  RngStream b(42, "random-rank");
  for (int i = 0; i < 50; ++i) {
    auto ra = rank_candidates(RankingKind::Random, servers, inputs, p, a);
    auto rb = rank_candidates(RankingKind::Random, servers, inputs, p, b);
    CHECK(ra[0].server == rb[0].server);
    CHECK(ra[1].server == rb[1].server);
  }

  RngStream c(7, "random-rank-uniform");
  int firsts[3] = {0, 0, 0};
  const int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    auto r = rank_candidates(RankingKind::Random, servers, inputs, p, c);
    ++firsts[r[0].server];
  }
  for (int s = 0; s < 3; ++s) {
    CHECK(firsts[s] > trials / 3 - trials / 20);
    CHECK(firsts[s] < trials / 3 + trials / 20);
  }
}
