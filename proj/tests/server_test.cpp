#include <doctest.h>

#include <stdexcept>

#include "rsim/server.hpp"

using namespace rsim;

namespace {

ServerConfig default_cfg() {
  ServerConfig cfg;
  cfg.slot_capacity = 4;
  cfg.base_service_ms = 4.0;
  cfg.range_d = 3.0;
  cfg.mode = FluctuationMode::Faster;
  cfg.rate_sample_weight = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("rate meter: two events in a four millisecond window is half a key per ms") {
  RateMeter meter;
  CHECK(meter.measure(4 * kMillisecond, 2, false, 0.1) == doctest::Approx(0.5));
}

TEST_CASE("rate meter: empty window folds in the previous one") {
  RateMeter meter;
  meter.measure(4 * kMillisecond, 1, false, 0.1);  // previous window: 1 event in 4 ms
  double rate = meter.measure(1 * kMillisecond, 0, true, 0.1);
  // One event over the combined five milliseconds, smoothed from 0.25.
  double expected = 0.9 * 0.25 + 0.1 * (1.0 / 5.0);
  CHECK(rate == doctest::Approx(expected));
}

TEST_CASE("rate meter: zero-length window keeps the previous estimate") {
  RateMeter meter;
  meter.measure(2 * kMillisecond, 4, false, 0.1);
  CHECK(meter.smoothed() == doctest::Approx(2.0));
  CHECK(meter.measure(0, 0, false, 0.1) == doctest::Approx(2.0));
  CHECK(meter.smoothed() == doctest::Approx(2.0));
}

TEST_CASE("rate meter: repeated empty windows decay the rate toward zero") {
  RateMeter meter;
  meter.measure(1 * kMillisecond, 5, false, 0.1);
  double previous = meter.smoothed();
  for (int i = 0; i < 50; ++i) {
    double now = meter.measure(1 * kMillisecond, 0, true, 0.1);
    CHECK(now <= previous);
    previous = now;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("server runs up to slot_capacity keys and queues the rest") {
  Server server(0, default_cfg());
  RngStream rng(1, "service/s0");
  for (KeyId k = 0; k < 4; ++k) {
    CHECK(server.on_key_arrival(k, 0, rng).has_value());
  }
  CHECK(!server.on_key_arrival(4, 0, rng).has_value());
  CHECK(server.busy_slots() == 4);
  CHECK(server.queue_length() == 1);
}

TEST_CASE("completion starts the longest-waiting key and reports the remaining queue") {
  Server server(0, default_cfg());
  RngStream rng(1, "service/s0");
  for (KeyId k = 0; k < 4; ++k) server.on_key_arrival(k, 0, rng);
  server.on_key_arrival(4, 1 * kMillisecond, rng);
  server.on_key_arrival(5, 2 * kMillisecond, rng);

  auto completion = server.on_service_complete(2, 3 * kMillisecond, rng);
  REQUIRE(completion.next.has_value());
  CHECK(completion.next->key == 4);  // FIFO
  // Key 5 is still waiting; the queue length reflects the send instant.
  CHECK(completion.feedback.queue_length == doctest::Approx(1.0));
  CHECK(server.queue_length() == 1);
  CHECK(server.busy_slots() == 4);
}

TEST_CASE("feedback carries the window rates, service time, and sojourn time") {
  Server server(0, default_cfg());
  RngStream rng(1, "service/s0");
  // Keys 0..3 all start at t=0; 1, 2, 3 finish during key 0's service.
  for (KeyId k = 0; k < 4; ++k) server.on_key_arrival(k, 0, rng);
  server.on_service_complete(1, 1 * kMillisecond, rng);
  server.on_service_complete(2, 2 * kMillisecond, rng);
  server.on_service_complete(3, 3 * kMillisecond, rng);
  auto completion = server.on_service_complete(0, 4 * kMillisecond, rng);

  CHECK(completion.feedback.service_time == 4 * kMillisecond);
  CHECK(completion.feedback.sojourn_time == 4 * kMillisecond);
  CHECK(completion.feedback.queue_length == doctest::Approx(0.0));
  // Raw served-rate samples, in completion order: 0/1ms (seeds the smoothed
  // value), 1/2ms, 2/3ms, and finally key 0's window with three completions
  // in 4 ms.
  double ewma = 0.0;
  ewma = 0.9 * ewma + 0.1 * 0.5;
  ewma = 0.9 * ewma + 0.1 * (2.0 / 3.0);
  ewma = 0.9 * ewma + 0.1 * 0.75;
  CHECK(completion.feedback.service_rate == doctest::Approx(ewma));
}

TEST_CASE("completing a key that is not in service throws") {
  Server server(0, default_cfg());
  RngStream rng(1, "service/s0");
  CHECK_THROWS_AS(server.on_service_complete(9, 1, rng), std::logic_error);
}

TEST_CASE("service durations are exponential around the regime mean") {
  ServerConfig cfg = default_cfg();
  cfg.slot_capacity = 1;
  Server server(0, cfg);
  RngStream rng(123, "service/s0");
  const int n = 200000;
  double total = 0.0;
  SimTime now = 0;
  for (int i = 0; i < n; ++i) {
    auto started = server.on_key_arrival(static_cast<KeyId>(i), now, rng);
    REQUIRE(started.has_value());
    CHECK(started->duration >= 1);
    total += static_cast<double>(started->duration);
    now += started->duration;
    server.on_service_complete(started->key, now, rng);
  }
  CHECK(total / n == doctest::Approx(4000.0).epsilon(0.01));
}

TEST_CASE("fluctuation flips the mean between the base and the boosted regime") {
  Server server(0, default_cfg());
  RngStream rng(7, "fluctuation/s0");
  int boosted = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    server.on_fluctuation_tick(rng);
    double mean = server.current_mean_service_ms();
    bool fast = mean == doctest::Approx(4.0 / 3.0);
    bool base = mean == doctest::Approx(4.0);
    CHECK((fast || base));
    if (fast) ++boosted;
  }
  CHECK(boosted == doctest::Approx(n / 2).epsilon(0.05));
}

TEST_CASE("slower mode stretches the boosted regime instead") {
  ServerConfig cfg = default_cfg();
  cfg.mode = FluctuationMode::Slower;
  Server server(0, cfg);
  RngStream rng(7, "fluctuation/s0");
  bool saw_slow = false;
  for (int i = 0; i < 100; ++i) {
    server.on_fluctuation_tick(rng);
    double mean = server.current_mean_service_ms();
    CHECK((mean == doctest::Approx(4.0) || mean == doctest::Approx(12.0)));
    if (mean > 5.0) saw_slow = true;
  }
  CHECK(saw_slow);
}

TEST_CASE("with no range the regime never moves") {
  ServerConfig cfg = default_cfg();
  cfg.range_d = 1.0;
  Server server(0, cfg);
  RngStream rng(7, "fluctuation/s0");
  for (int i = 0; i < 100; ++i) {
    server.on_fluctuation_tick(rng);
    CHECK(server.current_mean_service_ms() == doctest::Approx(4.0));
  }
}

TEST_CASE("true service rate tracks the current regime across all slots") {
  Server server(0, default_cfg());
  CHECK(server.true_service_rate() == doctest::Approx(1.0));  // 4 slots / 4 ms
  RngStream rng(3, "fluctuation/s0");
  for (int i = 0; i < 100; ++i) {
    server.on_fluctuation_tick(rng);
    if (server.current_mean_service_ms() < 2.0) {
      CHECK(server.true_service_rate() == doctest::Approx(3.0));
      return;
    }
  }
  FAIL("boosted regime never drawn in 100 ticks");
}
