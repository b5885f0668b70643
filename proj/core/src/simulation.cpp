#include "rsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsim {

namespace {

// Rounded to whole ticks, never zero, so simultaneous events cannot pile up
// from truncated draws.
SimTime ticks_from_ms(double ms) {
  return std::max<SimTime>(1, std::llround(ms * static_cast<double>(kMillisecond)));
}

}  // namespace

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed)
    : scenario_(scenario),
      ranking_(ranking_kind(scenario.strategy)),
      groups_(scenario.num_servers, scenario.replication),
      budget_left_(scenario.key_budget),
      fluctuation_interval_(ticks_from_ms(scenario.fluctuation_interval_ms)) {
  validate(scenario_);
  report_.seed = seed;

  ServerConfig server_cfg;
  server_cfg.slot_capacity = scenario.slot_capacity;
  server_cfg.base_service_ms = scenario.base_service_ms;
  server_cfg.range_d = scenario.range_d;
  server_cfg.mode = scenario.fluctuation_mode;
  server_cfg.rate_sample_weight = scenario.sample_weight;
  servers_.reserve(static_cast<std::size_t>(scenario.num_servers));
  service_rngs_.reserve(servers_.capacity());
  fluctuation_rngs_.reserve(servers_.capacity());
  for (int s = 0; s < scenario.num_servers; ++s) {
    servers_.emplace_back(static_cast<ServerId>(s), server_cfg);
    service_rngs_.emplace_back(seed, "service/s" + std::to_string(s));
    fluctuation_rngs_.emplace_back(seed, "fluctuation/s" + std::to_string(s));
  }

  ClientConfig client_cfg;
  client_cfg.num_servers = scenario.num_servers;
  client_cfg.base_service_ms = scenario.base_service_ms;
  client_cfg.one_way_latency = scenario.one_way_latency;
  client_cfg.sample_weight = scenario.sample_weight;
  client_cfg.params.client_count = scenario.num_clients;
  client_cfg.params.freshness_limit = scenario.freshness_limit;
  client_cfg.params.skip_limit = scenario.skip_limit;
  client_cfg.ranking = ranking_;
  client_cfg.rate_mode = rate_control_mode(scenario.strategy);
  client_cfg.limiter = scenario.limiter;
  clients_.reserve(static_cast<std::size_t>(scenario.num_clients));
  for (int c = 0; c < scenario.num_clients; ++c) {
    clients_.emplace_back(static_cast<ClientId>(c), client_cfg, seed);
  }
  retry_pending_.assign(clients_.size(), 0);

  WorkloadSpec workload;
  workload.total_rate = total_arrival_rate(scenario);
  workload.num_generators = scenario.num_generators;
  workload.skew = scenario.skew;
  for (const GeneratorSpec& spec : build_generators(workload, scenario.num_clients)) {
    GeneratorState gen;
    gen.spec = spec;
    auto gi = std::to_string(generators_.size());
    gen.arrivals = RngStream(seed, "arrivals/g" + gi);
    gen.partitions = RngStream(seed, "partition/g" + gi);
    generators_.push_back(std::move(gen));
  }
  keys_.reserve(static_cast<std::size_t>(scenario.key_budget));
}

RunReport Simulation::run() {
  // Every server draws its initial regime at time zero and redraws each
  // interval from then on.
  for (std::size_t s = 0; s < servers_.size(); ++s) {
    Event ev;
    ev.fire_at = 0;
    ev.kind = EventKind::FluctuationTick;
    ev.server = static_cast<ServerId>(s);
    queue_.schedule(ev);
  }
  for (std::size_t g = 0; g < generators_.size(); ++g) {
    GeneratorState& gen = generators_[g];
    Event ev;
    ev.fire_at = ticks_from_ms(gen.arrivals.exponential(1.0 / gen.spec.rate));
    ev.kind = EventKind::KeyGenerated;
    ev.actor = static_cast<std::int32_t>(g);
    queue_.schedule(ev);
  }
  {
    Event ev;
    ev.fire_at = scenario_.metrics_interval;
    ev.kind = EventKind::MeasurementTick;
    queue_.schedule(ev);
  }

  while (auto ev = queue_.pop_next()) {
    switch (ev->kind) {
      case EventKind::KeyGenerated: on_key_generated(ev->actor); break;
      case EventKind::KeyArrivesAtServer: on_key_arrives(*ev); break;
      case EventKind::ServiceCompletes: on_service_completes(*ev); break;
      case EventKind::ValueArrivesAtClient: on_value_arrives(*ev); break;
      case EventKind::FluctuationTick: on_fluctuation_tick(*ev); break;
      case EventKind::BacklogRetry: on_backlog_retry(*ev); break;
      case EventKind::MeasurementTick: on_measurement_tick(); break;
    }
  }

  report_.duration = queue_.now();
  report_.final_backlog = total_backlog();
  report_.final_outstanding = 0;
  for (const Client& c : clients_) {
    report_.final_outstanding += static_cast<std::uint64_t>(c.total_outstanding());
  }
  for (const Client& c : clients_) {
    for (int s = 0; s < scenario_.num_servers; ++s) {
      merge_audit(report_.audit, c.limiter(static_cast<ServerId>(s)).audit());
    }
  }
  report_.latency = summarize_latency(report_.latencies);
  if (report_.duration > 0) {
    report_.throughput_per_ms =
        static_cast<double>(report_.completed) / to_ms(report_.duration);
  }
  report_.trace_digest = queue_.trace_digest();
  return report_;
}

void Simulation::on_key_generated(std::int32_t generator) {
  GeneratorState& gen = generators_[static_cast<std::size_t>(generator)];
  if (budget_left_ == 0) return;  // another generator drained the budget
  --budget_left_;
  SimTime now = queue_.now();
  progress_at_ = now;

  KeyId key = keys_.size();
  KeyState ks;
  ks.client = gen.spec.client;
  ks.partition = static_cast<std::int32_t>(
      gen.partitions.uniform_int(static_cast<std::uint64_t>(groups_.num_groups())));
  ks.generated_at = now;
  keys_.push_back(ks);
  ++report_.generated;

  dispatch_new(key, now);

  if (budget_left_ > 0) {
    Event ev;
    ev.fire_at = now + ticks_from_ms(gen.arrivals.exponential(1.0 / gen.spec.rate));
    ev.kind = EventKind::KeyGenerated;
    ev.actor = generator;
    queue_.schedule(ev);
  }
}

void Simulation::observe_selection(const std::vector<ServerId>& group,
                                   const std::vector<ScoreInput>& inputs, SimTime now) {
  if (scenario_.collect_feedback_age) {
    for (const ScoreInput& in : inputs) report_.feedback_ages.push_back(in.feedback_age);
  }
  if (!scenario_.trace_server) return;
  if (ranking_ != RankingKind::C3 && ranking_ != RankingKind::Tars) return;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i] != *scenario_.trace_server) continue;
    const ScoreInput& in = inputs[i];
    const Client& owner = clients_[0];  // params are identical across clients
    EstimationSample sample;
    sample.at = now;
    sample.feedback_age = in.feedback_age;
    sample.true_queue =
        static_cast<double>(servers_[static_cast<std::size_t>(group[i])].queue_length());
    sample.estimate = ranking_ == RankingKind::C3
                          ? queue_estimate_c3(in, owner.params())
                          : queue_estimate_tars(in, owner.params());
    sample.feedback_queue = in.feedback.queue_length;
    sample.outstanding = in.outstanding;
    sample.queue_ewma = in.queue_ewma;
    sample.arrival_rate = in.feedback.arrival_rate;
    sample.service_rate = in.feedback.service_rate;
    sample.response_raw_ms = in.response_raw_ms;
    sample.sojourn_ms = to_ms(in.feedback.sojourn_time);
    sample.has_feedback = in.has_feedback;
    report_.estimation_trace.push_back(sample);
  }
}

bool Simulation::try_send(KeyId key, SimTime now) {
  KeyState& ks = keys_[static_cast<std::size_t>(key)];
  Client& client = clients_[static_cast<std::size_t>(ks.client)];
  const std::vector<ServerId>& group = groups_.group(ks.partition);
  std::vector<ScoreInput> inputs = client.selection_inputs(group, now);
  if (ranking_ == RankingKind::Oracle) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      const Server& server = servers_[static_cast<std::size_t>(group[i])];
      inputs[i].true_queue = static_cast<double>(server.queue_length());
      inputs[i].true_rate = server.true_service_rate();
    }
  }
  observe_selection(group, inputs, now);
  std::optional<ServerId> chosen = client.try_choose(group, inputs, now);
  if (!chosen) return false;
  ks.sent_at = now;
  ks.server = *chosen;
  progress_at_ = now;
  Event ev;
  ev.fire_at = now + scenario_.one_way_latency;
  ev.kind = EventKind::KeyArrivesAtServer;
  ev.key = key;
  ev.server = *chosen;
  queue_.schedule(ev);
  return true;
}

void Simulation::dispatch_new(KeyId key, SimTime now) {
  if (try_send(key, now)) return;
  KeyState& ks = keys_[static_cast<std::size_t>(key)];
  Client& client = clients_[static_cast<std::size_t>(ks.client)];
  client.backlog_push(key);
  ++report_.backlogged_keys;
  report_.backlog_peak = std::max(report_.backlog_peak, total_backlog());
  schedule_retry_if_needed(ks.client, now);
}

void Simulation::schedule_retry_if_needed(ClientId c, SimTime now) {
  Client& client = clients_[static_cast<std::size_t>(c)];
  if (retry_pending_[static_cast<std::size_t>(c)]) return;
  std::optional<KeyId> front = client.backlog_front();
  if (!front) return;
  const std::vector<ServerId>& group =
      groups_.group(keys_[static_cast<std::size_t>(*front)].partition);
  SimTime at = client.earliest_retry(group, now);
  if (at <= now) at = now + 1;
  Event ev;
  ev.fire_at = at;
  ev.kind = EventKind::BacklogRetry;
  ev.actor = c;
  queue_.schedule(ev);
  retry_pending_[static_cast<std::size_t>(c)] = 1;
}

void Simulation::drain_backlog(ClientId c, SimTime now) {
  Client& client = clients_[static_cast<std::size_t>(c)];
  while (std::optional<KeyId> front = client.backlog_front()) {
    if (!try_send(*front, now)) break;
    client.backlog_pop_front();
  }
  schedule_retry_if_needed(c, now);
}

void Simulation::on_backlog_retry(const Event& ev) {
  ClientId c = ev.actor;
  retry_pending_[static_cast<std::size_t>(c)] = 0;
  ++report_.retry_events;
  drain_backlog(c, queue_.now());
}

void Simulation::on_key_arrives(const Event& ev) {
  Server& server = servers_[static_cast<std::size_t>(ev.server)];
  auto started =
      server.on_key_arrival(ev.key, queue_.now(), service_rngs_[static_cast<std::size_t>(ev.server)]);
  if (started) {
    Event done;
    done.fire_at = queue_.now() + started->duration;
    done.kind = EventKind::ServiceCompletes;
    done.key = started->key;
    done.server = ev.server;
    queue_.schedule(done);
  }
}

void Simulation::on_service_completes(const Event& ev) {
  SimTime now = queue_.now();
  Server& server = servers_[static_cast<std::size_t>(ev.server)];
  Server::Completion completion =
      server.on_service_complete(ev.key, now, service_rngs_[static_cast<std::size_t>(ev.server)]);
  if (completion.next) {
    Event done;
    done.fire_at = now + completion.next->duration;
    done.kind = EventKind::ServiceCompletes;
    done.key = completion.next->key;
    done.server = ev.server;
    queue_.schedule(done);
  }
  KeyState& ks = keys_[static_cast<std::size_t>(ev.key)];
  ks.feedback = completion.feedback;
  Event back;
  back.fire_at = now + scenario_.one_way_latency;
  back.kind = EventKind::ValueArrivesAtClient;
  back.key = ev.key;
  back.actor = ks.client;
  back.server = ev.server;
  queue_.schedule(back);
}

void Simulation::on_value_arrives(const Event& ev) {
  SimTime now = queue_.now();
  KeyState& ks = keys_[static_cast<std::size_t>(ev.key)];
  if (ks.completed) {
    throw std::logic_error("key " + std::to_string(ev.key) + " completed twice");
  }
  Client& client = clients_[static_cast<std::size_t>(ks.client)];
  client.on_value(ev.server, ks.feedback, ks.sent_at, now);
  ks.completed = true;
  ++report_.completed;
  progress_at_ = now;
  report_.latencies.push_back(now - ks.generated_at);
  drain_backlog(ks.client, now);
}

void Simulation::on_fluctuation_tick(const Event& ev) {
  std::size_t s = static_cast<std::size_t>(ev.server);
  servers_[s].on_fluctuation_tick(fluctuation_rngs_[s]);
  if (!work_remains()) return;
  if (queue_.now() - progress_at_ > 60 * kSecond) {
    throw std::logic_error("simulation stalled: no key progress for 60 simulated seconds");
  }
  Event next = ev;
  next.fire_at = queue_.now() + fluctuation_interval_;
  queue_.schedule(next);
}

void Simulation::on_measurement_tick() {
  report_.backlog_series.emplace_back(queue_.now(), total_backlog());
  if (!work_remains()) return;
  Event next;
  next.fire_at = queue_.now() + scenario_.metrics_interval;
  next.kind = EventKind::MeasurementTick;
  queue_.schedule(next);
}

std::uint64_t Simulation::total_backlog() const {
  std::uint64_t total = 0;
  for (const Client& c : clients_) total += c.backlog_size();
  return total;
}

bool Simulation::work_remains() const {
  return budget_left_ > 0 || report_.completed < report_.generated;
}

}  // namespace rsim
