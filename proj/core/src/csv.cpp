#include "rsim/csv.hpp"

#include <cstdio>

namespace rsim {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_summary_csv(std::ostream& out, const Scenario& scenario,
                       const std::vector<RunReport>& runs) {
  out << "strategy,seed,num_servers,num_clients,num_generators,replication,slot_capacity,"
         "base_service_ms,range_d,fluctuation_interval_ms,fluctuation_mode,utilization,"
         "skew,key_budget,one_way_latency_us,generated,completed,duration_ms,"
         "throughput_per_ms,mean_ms,p50_ms,p95_ms,p99_ms,p999_ms,backlogged_keys,"
         "backlog_peak,retry_events,min_send_rate,rate_decreases,rate_increases\n";
  for (const RunReport& run : runs) {
    out << strategy_name(scenario.strategy) << ',' << run.seed << ',' << scenario.num_servers
        << ',' << scenario.num_clients << ',' << scenario.num_generators << ','
        << scenario.replication << ',' << scenario.slot_capacity << ','
        << format_double(scenario.base_service_ms) << ',' << format_double(scenario.range_d)
        << ',' << format_double(scenario.fluctuation_interval_ms) << ','
        << (scenario.fluctuation_mode == FluctuationMode::Faster ? "faster" : "slower") << ','
        << format_double(scenario.utilization) << ',' << skew_name(scenario.skew) << ','
        << scenario.key_budget << ',' << scenario.one_way_latency << ',' << run.generated
        << ',' << run.completed << ',' << format_double(to_ms(run.duration)) << ','
        << format_double(run.throughput_per_ms) << ',' << format_double(run.latency.mean_ms)
        << ',' << format_double(run.latency.p50_ms) << ',' << format_double(run.latency.p95_ms)
        << ',' << format_double(run.latency.p99_ms) << ','
        << format_double(run.latency.p999_ms) << ',' << run.backlogged_keys << ','
        << run.backlog_peak << ',' << run.retry_events << ','
        << format_double(run.audit.min_rate) << ',' << run.audit.decreases << ','
        << run.audit.increases << '\n';
  }
}

void write_cdf_csv(std::ostream& out, const std::string& value_label,
                   const std::vector<CdfPoint>& cdf, const std::string& note) {
  if (!note.empty()) out << "# " << note << '\n';
  out << value_label << ",cumulative\n";
  for (const CdfPoint& p : cdf) {
    out << format_double(p.value_ms) << ',' << format_double(p.cumulative) << '\n';
  }
}

void write_estimation_trace_csv(std::ostream& out,
                                const std::vector<EstimationSample>& trace) {
  out << "time_ms,feedback_age_ms,true_queue,estimate,feedback_queue,outstanding,"
         "queue_ewma,arrival_rate,service_rate,response_raw_ms,sojourn_ms,has_feedback\n";
  for (const EstimationSample& s : trace) {
    out << format_double(to_ms(s.at)) << ',' << format_double(to_ms(s.feedback_age)) << ','
        << format_double(s.true_queue) << ',' << format_double(s.estimate) << ','
        << format_double(s.feedback_queue) << ',' << s.outstanding << ','
        << format_double(s.queue_ewma) << ',' << format_double(s.arrival_rate) << ','
        << format_double(s.service_rate) << ',' << format_double(s.response_raw_ms) << ','
        << format_double(s.sojourn_ms) << ',' << (s.has_feedback ? 1 : 0) << '\n';
  }
}

void write_backlog_csv(std::ostream& out,
                       const std::vector<std::pair<SimTime, std::uint64_t>>& series) {
  out << "time_ms,backlogged\n";
  for (const auto& [at, count] : series) {
    out << format_double(to_ms(at)) << ',' << count << '\n';
  }
}

}  // namespace rsim
