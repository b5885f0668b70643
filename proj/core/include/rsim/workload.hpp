#pragma once

#include <optional>
#include <vector>

#include "rsim/time.hpp"

namespace rsim {

// Demand skew: `client_fraction` of the clients generate `demand_fraction`
// of all keys. Absent skew means every client generates at the same rate.
struct SkewSpec {
  double client_fraction = 0.2;
  double demand_fraction = 0.8;
};

struct WorkloadSpec {
  double total_rate = 0.0;  // keys/ms across the whole cluster
  int num_generators = 200;
  std::optional<SkewSpec> skew;
};

// One Poisson source attached to a client. A client's sources together
// produce its demand share, so the number of generators shapes only how the
// arrival streams are drawn, not the per-client load.
struct GeneratorSpec {
  ClientId client = 0;
  double rate = 0.0;  // keys/ms
};

// Splits the total rate into per-client shares (the first
// `client_fraction * n` clients are the hot ones under skew) and deals
// generators out to clients round-robin, hot clients getting proportionally
// more of them.
std::vector<GeneratorSpec> build_generators(const WorkloadSpec& spec, int num_clients);

// Partitioned replica placement: one group per server, group i covering
// servers i..i+k-1 cyclically. Every server therefore belongs to exactly k
// groups.
class ReplicaGroupMap {
 public:
  ReplicaGroupMap(int num_servers, int replication);

  int num_groups() const { return static_cast<int>(groups_.size()); }
  const std::vector<ServerId>& group(int partition) const {
    return groups_[static_cast<std::size_t>(partition)];
  }

 private:
  std::vector<std::vector<ServerId>> groups_;
};

}  // namespace rsim
