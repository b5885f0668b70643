#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rsim/feedback.hpp"
#include "rsim/rate_limiter.hpp"
#include "rsim/rng.hpp"
#include "rsim/time.hpp"

namespace rsim {

// Replica selection schemes. The last two are plain baselines without any
// rate control.
enum class StrategyId {
  C3,            // smoothed queue estimate, receive-rate-triggered control
  Tars,          // timeliness-aware estimate, queue-feedback-triggered control
  OracleC3Rc,    // true queue and rate for ranking, C3-style control
  OracleTarsRc,  // true queue and rate for ranking, Tars-style control
  Trr,           // Tars ranking combined with C3-style control
  Random,
  LeastOutstanding,
};

enum class RankingKind { C3, Tars, Oracle, Random, LeastOutstanding };

RankingKind ranking_kind(StrategyId id);
RateControlMode rate_control_mode(StrategyId id);
StrategyId parse_strategy(std::string_view name);
std::string strategy_name(StrategyId id);
const std::vector<StrategyId>& all_strategies();

struct StrategyParams {
  int client_count = 150;              // n, the concurrency multiplier
  SimTime freshness_limit = 100 * kMillisecond;  // feedback older than this is stale
  int skip_limit = 6;                  // unselected count that forces a re-probe
};

// Per-candidate snapshot a client sees at selection time. Client-side values
// are smoothed across responses; the feedback block holds the raw values the
// server sent with the most recent response.
struct ScoreInput {
  double queue_ewma = 0.0;        // smoothed feedback queue length (q_s)
  double service_ewma_ms = 4.0;   // smoothed feedback service time (T_s bar)
  double response_ewma_ms = 4.5;  // smoothed response time (R_s bar)
  double response_raw_ms = 4.5;   // most recent raw response time (R_s)
  int outstanding = 0;            // keys sent but not yet answered (os_s)
  int not_selected = 0;           // selections lost since the last response (f_s)
  bool has_feedback = false;
  Feedback feedback;              // raw piggybacked state from the last response
  SimTime feedback_age = 0;       // now - time the last feedback arrived (tau_w)

  // Filled only for the oracle ranking.
  double true_queue = 0.0;
  double true_rate = 0.0;  // keys/ms across all slots
};

// Expected wait proxy in milliseconds; lower is better.
double score_c3(const ScoreInput& in, const StrategyParams& p);
double score_tars(const ScoreInput& in, const StrategyParams& p);
double score_oracle(const ScoreInput& in);
double score_least_outstanding(const ScoreInput& in);

// The queue estimate each scheme plugs into its score; exposed for the
// estimation-quality reports.
double queue_estimate_c3(const ScoreInput& in, const StrategyParams& p);
double queue_estimate_tars(const ScoreInput& in, const StrategyParams& p);

struct RankedCandidate {
  ServerId server = -1;
  double score = 0.0;
};

// Scores every candidate and sorts ascending; ties fall back to the lower
// server id. The random baseline draws scores from `rng`.
std::vector<RankedCandidate> rank_candidates(RankingKind kind,
                                             const std::vector<ServerId>& servers,
                                             const std::vector<ScoreInput>& inputs,
                                             const StrategyParams& params,
                                             RngStream& rng);

}  // namespace rsim
