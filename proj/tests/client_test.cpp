#include <doctest.h>

#include <stdexcept>

#include <optional>
#include <vector>

#include "rsim/client.hpp"

using namespace rsim;

namespace {

ClientConfig baseline_config(int servers) {
  ClientConfig cfg;
  cfg.num_servers = servers;
  cfg.ranking = RankingKind::LeastOutstanding;
  cfg.rate_mode = RateControlMode::None;
  cfg.sample_weight = 0.1;  // the frozen EWMA arithmetic below assumes this
  return cfg;
}

Feedback sample_feedback() {
  Feedback fb;
  fb.queue_length = 3.0;
  fb.service_time = 2 * kMillisecond;
  fb.arrival_rate = 1.1;
  fb.service_rate = 0.9;
  fb.sojourn_time = 5 * kMillisecond;
  return fb;
}

}  // namespace

TEST_CASE("views start from the base service time and the idle round trip") {
  Client c(0, baseline_config(3), 1);
  const ReplicaView& v = c.view(1);
  CHECK(v.service_ewma_ms == doctest::Approx(4.0));
  CHECK(v.response_ewma_ms == doctest::Approx(4.5));  // 2 * 0.25 + 4
  CHECK(v.response_raw_ms == doctest::Approx(4.5));
  CHECK(!v.has_feedback);
  CHECK(v.outstanding == 0);
  CHECK(c.total_outstanding() == 0);
}

TEST_CASE("selection picks the best admitted server and bumps the rest") {
  Client c(0, baseline_config(3), 1);
  std::vector<ServerId> group = {0, 1, 2};

  auto first = c.try_choose(group, c.selection_inputs(group, 0), 0);
  REQUIRE(first.has_value());
  CHECK(*first == 0);  // all tied, lowest id wins
  CHECK(c.view(0).outstanding == 1);
  CHECK(c.view(1).not_selected == 1);
  CHECK(c.view(2).not_selected == 1);

  auto second = c.try_choose(group, c.selection_inputs(group, 0), 0);
  REQUIRE(second.has_value());
  CHECK(*second == 1);  // 0 now has an outstanding key
  CHECK(c.view(0).not_selected == 1);
  CHECK(c.view(2).not_selected == 2);

  auto third = c.try_choose(group, c.selection_inputs(group, 0), 0);
  REQUIRE(third.has_value());
  CHECK(*third == 2);
  CHECK(c.total_outstanding() == 3);
}

TEST_CASE("when every limiter is closed nothing is chosen and every skip counts") {
  ClientConfig cfg = baseline_config(2);
  cfg.rate_mode = RateControlMode::QueueFeedback;
  cfg.limiter.initial_rate = 1.0;
  Client c(0, cfg, 1);
  std::vector<ServerId> group = {0, 1};

  SimTime t = 100 * kMillisecond;
  auto a = c.try_choose(group, c.selection_inputs(group, t), t);
  REQUIRE(a.has_value());
  CHECK(*a == 0);
  auto b = c.try_choose(group, c.selection_inputs(group, t), t);
  REQUIRE(b.has_value());
  CHECK(*b == 1);

  auto blocked = c.try_choose(group, c.selection_inputs(group, t), t);
  CHECK(!blocked.has_value());
  CHECK(c.view(0).not_selected == 2);  // one earlier skip plus the blocked round
  CHECK(c.view(1).not_selected == 2);
  CHECK(c.total_outstanding() == 2);

  // The blocked round becomes sendable once the window slides past the sends.
  CHECK(c.earliest_retry(group, t + 1) == t + 20 * kMillisecond);
  auto retry = c.try_choose(group, c.selection_inputs(group, t + 20 * kMillisecond),
                            t + 20 * kMillisecond);
  CHECK(retry.has_value());
}

TEST_CASE("a returned value updates the smoothed view and resets the skip count") {
  Client c(0, baseline_config(1), 1);
  std::vector<ServerId> group = {0};
  SimTime sent_at = 1 * kMillisecond;
  auto chosen = c.try_choose(group, c.selection_inputs(group, sent_at), sent_at);
  REQUIRE(chosen.has_value());

  SimTime now = sent_at + 6 * kMillisecond;
  c.on_value(0, sample_feedback(), sent_at, now);
  const ReplicaView& v = c.view(0);
  CHECK(v.outstanding == 0);
  CHECK(v.response_raw_ms == doctest::Approx(6.0));
  CHECK(v.response_ewma_ms == doctest::Approx(0.9 * 4.5 + 0.1 * 6.0));
  CHECK(v.queue_ewma == doctest::Approx(0.1 * 3.0));
  CHECK(v.service_ewma_ms == doctest::Approx(0.9 * 4.0 + 0.1 * 2.0));
  CHECK(v.has_feedback);
  CHECK(v.feedback.queue_length == doctest::Approx(3.0));
  CHECK(v.feedback.sojourn_time == 5 * kMillisecond);
  CHECK(v.not_selected == 0);
  CHECK(v.feedback_received_at == now);
}

TEST_CASE("skips accumulate between responses and clear on the next one") {
  Client c(0, baseline_config(2), 1);
  std::vector<ServerId> group = {0, 1};
  auto chosen = c.try_choose(group, c.selection_inputs(group, 0), 0);
  REQUIRE(chosen.has_value());  // server 0; server 1 skipped
  (void)c.try_choose(group, c.selection_inputs(group, 0), 0);  // server 1 chosen, 0 skipped
  (void)c.try_choose(group, c.selection_inputs(group, 0), 0);  // tie on os=1: server 0
  CHECK(c.view(1).not_selected == 2);

  c.on_value(1, sample_feedback(), 0, 4 * kMillisecond);
  CHECK(c.view(1).not_selected == 0);
}

TEST_CASE("feedback age is measured from the arrival of the last value") {
  Client c(0, baseline_config(1), 1);
  std::vector<ServerId> group = {0};
  auto before = c.selection_inputs(group, 30 * kMillisecond);
  CHECK(before[0].feedback_age == 30 * kMillisecond);  // nothing received yet

  (void)c.try_choose(group, before, 30 * kMillisecond);
  c.on_value(0, sample_feedback(), 30 * kMillisecond, 36 * kMillisecond);
  auto after = c.selection_inputs(group, 41 * kMillisecond);
  CHECK(after[0].feedback_age == 5 * kMillisecond);
  CHECK(after[0].has_feedback);
}

TEST_CASE("a value with no outstanding key is a logic error") {
  Client c(0, baseline_config(1), 1);
  CHECK_THROWS_AS(c.on_value(0, sample_feedback(), 0, kMillisecond), std::logic_error);
}

TEST_CASE("the backlog is a FIFO") {
  Client c(0, baseline_config(1), 1);
  CHECK(!c.backlog_front().has_value());
  c.backlog_push(11);
  c.backlog_push(22);
  c.backlog_push(33);
  CHECK(c.backlog_size() == 3);
  CHECK(*c.backlog_front() == 11);
  c.backlog_pop_front();
  CHECK(*c.backlog_front() == 22);
}

TEST_CASE("earliest retry looks across the whole group") {
  ClientConfig cfg = baseline_config(2);
  cfg.rate_mode = RateControlMode::QueueFeedback;
  cfg.limiter.initial_rate = 1.0;
  Client c(0, cfg, 1);
  std::vector<ServerId> group = {0, 1};

  SimTime t = 50 * kMillisecond;
  (void)c.try_choose(group, c.selection_inputs(group, t), t);              // server 0
  (void)c.try_choose(group, c.selection_inputs(group, t + 2 * kMillisecond),
                     t + 2 * kMillisecond);                                // server 1
  SimTime now = t + 3 * kMillisecond;
  // Server 0 frees up first: its send ages out at t + 20 ms.
  CHECK(c.earliest_retry(group, now) == t + 20 * kMillisecond);
}
