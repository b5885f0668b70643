#pragma once

#include <cstdint>
#include <vector>

#include "rsim/client.hpp"
#include "rsim/config.hpp"
#include "rsim/event_queue.hpp"
#include "rsim/metrics.hpp"
#include "rsim/server.hpp"
#include "rsim/workload.hpp"

namespace rsim {

// One run of a scenario under one seed: generators feed keys to clients,
// clients pick a replica per key (or park it in their backlog when every
// candidate's limiter is closed), servers serve and send values back with
// feedback piggybacked. The run ends when the key budget is exhausted and
// every key has completed.
class Simulation {
 public:
  Simulation(const Scenario& scenario, std::uint64_t seed);

  RunReport run();

  const Server& server(ServerId s) const { return servers_[static_cast<std::size_t>(s)]; }
  const Client& client(ClientId c) const { return clients_[static_cast<std::size_t>(c)]; }
  SimTime now() const { return queue_.now(); }

 private:
  struct KeyState {
    ClientId client = -1;
    std::int32_t partition = -1;
    SimTime generated_at = 0;
    SimTime sent_at = 0;
    ServerId server = -1;
    Feedback feedback;  // rides back with the value
    bool completed = false;
  };

  struct GeneratorState {
    GeneratorSpec spec;
    RngStream arrivals;
    RngStream partitions;
  };

  void on_key_generated(std::int32_t generator);
  void on_key_arrives(const Event& ev);
  void on_service_completes(const Event& ev);
  void on_value_arrives(const Event& ev);
  void on_fluctuation_tick(const Event& ev);
  void on_backlog_retry(const Event& ev);
  void on_measurement_tick();

  bool try_send(KeyId key, SimTime now);
  void dispatch_new(KeyId key, SimTime now);
  void drain_backlog(ClientId c, SimTime now);
  void schedule_retry_if_needed(ClientId c, SimTime now);
  void observe_selection(const std::vector<ServerId>& group,
                         const std::vector<ScoreInput>& inputs, SimTime now);
  std::uint64_t total_backlog() const;
  bool work_remains() const;

  Scenario scenario_;
  RankingKind ranking_;
  EventQueue queue_;
  ReplicaGroupMap groups_;
  std::vector<Server> servers_;
  std::vector<Client> clients_;
  std::vector<GeneratorState> generators_;
  std::vector<RngStream> service_rngs_;
  std::vector<RngStream> fluctuation_rngs_;
  std::vector<KeyState> keys_;
  std::vector<char> retry_pending_;
  std::uint64_t budget_left_ = 0;
  SimTime fluctuation_interval_ = 0;
  SimTime progress_at_ = 0;
  RunReport report_;
};

}  // namespace rsim
