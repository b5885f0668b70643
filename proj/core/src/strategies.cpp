#include "rsim/strategies.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsim {

RankingKind ranking_kind(StrategyId id) {
  switch (id) {
    case StrategyId::C3:
      return RankingKind::C3;
    case StrategyId::Tars:
    case StrategyId::Trr:
      return RankingKind::Tars;
    case StrategyId::OracleC3Rc:
    case StrategyId::OracleTarsRc:
      return RankingKind::Oracle;
    case StrategyId::Random:
      return RankingKind::Random;
    case StrategyId::LeastOutstanding:
      return RankingKind::LeastOutstanding;
  }
  throw std::logic_error("unknown strategy");
}

RateControlMode rate_control_mode(StrategyId id) {
  switch (id) {
    case StrategyId::C3:
    case StrategyId::OracleC3Rc:
    case StrategyId::Trr:
      return RateControlMode::SendReceive;
    case StrategyId::Tars:
    case StrategyId::OracleTarsRc:
      return RateControlMode::QueueFeedback;
    case StrategyId::Random:
    case StrategyId::LeastOutstanding:
      return RateControlMode::None;
  }
  throw std::logic_error("unknown strategy");
}

StrategyId parse_strategy(std::string_view name) {
  if (name == "c3") return StrategyId::C3;
  if (name == "tars") return StrategyId::Tars;
  if (name == "oracle_c3rc") return StrategyId::OracleC3Rc;
  if (name == "oracle_tarsrc") return StrategyId::OracleTarsRc;
  if (name == "trr") return StrategyId::Trr;
  if (name == "random") return StrategyId::Random;
  if (name == "lor") return StrategyId::LeastOutstanding;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "'; expected one of c3, tars, oracle_c3rc, oracle_tarsrc, "
                              "trr, random, lor");
}

std::string strategy_name(StrategyId id) {
  switch (id) {
    case StrategyId::C3: return "c3";
    case StrategyId::Tars: return "tars";
    case StrategyId::OracleC3Rc: return "oracle_c3rc";
    case StrategyId::OracleTarsRc: return "oracle_tarsrc";
    case StrategyId::Trr: return "trr";
    case StrategyId::Random: return "random";
    case StrategyId::LeastOutstanding: return "lor";
  }
  throw std::logic_error("unknown strategy");
}

const std::vector<StrategyId>& all_strategies() {
  static const std::vector<StrategyId> ids = {
      StrategyId::C3,           StrategyId::Tars, StrategyId::OracleC3Rc,
      StrategyId::OracleTarsRc, StrategyId::Trr,  StrategyId::Random,
      StrategyId::LeastOutstanding,
  };
  return ids;
}

double queue_estimate_c3(const ScoreInput& in, const StrategyParams& p) {
  return 1.0 + in.queue_ewma + static_cast<double>(p.client_count) * in.outstanding;
}

double score_c3(const ScoreInput& in, const StrategyParams& p) {
  double q = queue_estimate_c3(in, p);
  return in.response_ewma_ms - in.service_ewma_ms + q * q * q * in.service_ewma_ms;
}

namespace {

bool tars_is_stale(const ScoreInput& in, const StrategyParams& p) {
  // Without any feedback, or with a dead rate estimate, the fresh path has
  // nothing to extrapolate from; fall back to the stale rules.
  if (!in.has_feedback || in.feedback.service_rate <= 0.0) return true;
  return in.feedback_age > p.freshness_limit;
}

}  // namespace

double queue_estimate_tars(const ScoreInput& in, const StrategyParams& p) {
  double os_term = static_cast<double>(in.outstanding) * p.client_count;
  if (tars_is_stale(in, p)) {
    if (in.outstanding == 0 && in.not_selected == 0) return 0.0;
    if (in.outstanding == 0 && in.not_selected > p.skip_limit) return 0.0;
    return 1.0 + in.queue_ewma + os_term;
  }
  // Extrapolate the reported queue over the feedback's one-way delay: the
  // queue grew by the arrival/service rate imbalance while the value was in
  // flight. Raw values only; smoothing here would re-introduce the lag the
  // extrapolation removes.
  double flight_ms = in.response_raw_ms - to_ms(in.feedback.sojourn_time);
  double estimate = in.feedback.queue_length +
                    (in.feedback.arrival_rate - in.feedback.service_rate) * flight_ms +
                    os_term;
  return std::max(estimate, 0.0);
}

double score_tars(const ScoreInput& in, const StrategyParams& p) {
  double mu = tars_is_stale(in, p) ? 1.0 / in.service_ewma_ms : in.feedback.service_rate;
  double q = queue_estimate_tars(in, p);
  return in.response_raw_ms - to_ms(in.feedback.sojourn_time) + q * q * q / mu;
}

double score_oracle(const ScoreInput& in) {
  return in.true_queue / in.true_rate;
}

double score_least_outstanding(const ScoreInput& in) {
  return static_cast<double>(in.outstanding);
}

std::vector<RankedCandidate> rank_candidates(RankingKind kind,
                                             const std::vector<ServerId>& servers,
                                             const std::vector<ScoreInput>& inputs,
                                             const StrategyParams& params,
                                             RngStream& rng) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(servers.size());
  for (std::size_t i = 0; i < servers.size(); ++i) {
    double score = 0.0;
    switch (kind) {
      case RankingKind::C3: score = score_c3(inputs[i], params); break;
      case RankingKind::Tars: score = score_tars(inputs[i], params); break;
      case RankingKind::Oracle: score = score_oracle(inputs[i]); break;
      case RankingKind::Random: score = rng.uniform01(); break;
      case RankingKind::LeastOutstanding: score = score_least_outstanding(inputs[i]); break;
    }
    ranked.push_back(RankedCandidate{servers[i], score});
  }
  // Ties keep the replica-group order (the partition owner first): spreading
  // tied picks by partition avoids synchronized bursts onto servers shared by
  // several groups.
  std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.server < b.server;
  });
  return ranked;
}

}  // namespace rsim
