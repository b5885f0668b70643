#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rsim/config.hpp"
#include "rsim/metrics.hpp"

namespace rsim {

// Shortest round-trip formatting so equal doubles always print the same.
std::string format_double(double v);

// One row per seed; every scenario knob is repeated on each row so the file
// is self-contained.
void write_summary_csv(std::ostream& out, const Scenario& scenario,
                       const std::vector<RunReport>& runs);

// `note` becomes a leading comment line (e.g. how samples were pooled).
void write_cdf_csv(std::ostream& out, const std::string& value_label,
                   const std::vector<CdfPoint>& cdf, const std::string& note);

void write_estimation_trace_csv(std::ostream& out, const std::vector<EstimationSample>& trace);

void write_backlog_csv(std::ostream& out,
                       const std::vector<std::pair<SimTime, std::uint64_t>>& series);

}  // namespace rsim
