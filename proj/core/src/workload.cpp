#include "rsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsim {

std::vector<GeneratorSpec> build_generators(const WorkloadSpec& spec, int num_clients) {
  if (num_clients < 1) throw std::invalid_argument("num_clients must be >= 1");
  if (spec.num_generators < 1) throw std::invalid_argument("num_generators must be >= 1");
  if (spec.total_rate <= 0) throw std::invalid_argument("total_rate must be > 0");

  int hot_clients = 0;
  double hot_demand = 0.0;
  if (spec.skew) {
    hot_clients = static_cast<int>(std::llround(spec.skew->client_fraction * num_clients));
    hot_clients = std::max(1, std::min(hot_clients, num_clients - 1));
    hot_demand = spec.skew->demand_fraction;
  }
  int cold_clients = num_clients - hot_clients;

  // Deal generators to clients round-robin; under skew the hot clients get
  // a share of the generators proportional to their demand.
  int hot_generators = 0;
  if (spec.skew) {
    hot_generators = static_cast<int>(std::llround(hot_demand * spec.num_generators));
    hot_generators = std::max(1, std::min(hot_generators, spec.num_generators - 1));
  }
  std::vector<int> generators_of(static_cast<std::size_t>(num_clients), 0);
  std::vector<GeneratorSpec> out(static_cast<std::size_t>(spec.num_generators));
  for (int g = 0; g < spec.num_generators; ++g) {
    ClientId c;
    if (spec.skew) {
      c = g < hot_generators
              ? static_cast<ClientId>(g % hot_clients)
              : static_cast<ClientId>(hot_clients + (g - hot_generators) % cold_clients);
    } else {
      c = static_cast<ClientId>(g % num_clients);
    }
    out[static_cast<std::size_t>(g)].client = c;
    ++generators_of[static_cast<std::size_t>(c)];
  }

  // Each demand pool is split evenly across the clients in it that actually
  // hold a generator, so the delivered total always matches `total_rate`
  // even when there are fewer generators than clients (the leftover clients
  // stay idle). A client's generators then share its rate equally.
  int active_hot = 0;
  int active_cold = 0;
  for (int c = 0; c < num_clients; ++c) {
    if (generators_of[static_cast<std::size_t>(c)] == 0) continue;
    if (spec.skew && c < hot_clients) {
      ++active_hot;
    } else {
      ++active_cold;
    }
  }
  for (GeneratorSpec& gen : out) {
    double client_rate;
    if (spec.skew) {
      client_rate = gen.client < hot_clients
                        ? spec.total_rate * hot_demand / active_hot
                        : spec.total_rate * (1.0 - hot_demand) / active_cold;
    } else {
      client_rate = spec.total_rate / active_cold;
    }
    gen.rate = client_rate / generators_of[static_cast<std::size_t>(gen.client)];
  }
  return out;
}

ReplicaGroupMap::ReplicaGroupMap(int num_servers, int replication) {
  if (num_servers < 1) throw std::invalid_argument("num_servers must be >= 1");
  if (replication < 1 || replication > num_servers) {
    throw std::invalid_argument("replication must be in [1, num_servers]");
  }
  groups_.resize(static_cast<std::size_t>(num_servers));
  for (int i = 0; i < num_servers; ++i) {
    auto& g = groups_[static_cast<std::size_t>(i)];
    g.reserve(static_cast<std::size_t>(replication));
    for (int r = 0; r < replication; ++r) {
      g.push_back(static_cast<ServerId>((i + r) % num_servers));
    }
  }
}

}  // namespace rsim
