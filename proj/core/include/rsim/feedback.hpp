#pragma once

#include "rsim/time.hpp"

namespace rsim {

// Server state piggybacked on every returned value. Rates are in keys per
// millisecond; durations are in ticks.
struct Feedback {
  double queue_length = 0.0;      // wait-queue length at the send instant
  SimTime service_time = 0;       // how long this key was in service
  double arrival_rate = 0.0;      // smoothed incoming key rate at the server
  double service_rate = 0.0;      // smoothed served key rate at the server
  SimTime sojourn_time = 0;       // arrival at server to value sent
};

}  // namespace rsim
