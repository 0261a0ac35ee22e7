#pragma once

// Bound reports for the command-line front end: computation, JSON and CSV.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbayes/conic.hpp"
#include "qbayes/model.hpp"
#include "qbayes/verify.hpp"

namespace qbayes {

struct BoundEntry {
  std::string name;
  std::optional<double> value;
  std::string solver_status;  // optimal, closed_form, heuristic, or error
  double gap = 0.0;
  double wall_time_ms = 0.0;
  std::string error;
  std::optional<ErrorKind> error_kind;
  std::vector<std::string> warnings;
};

struct BoundReport {
  std::string model_digest;
  std::vector<BoundEntry> bounds;
  std::optional<AuditRecord> audit;
  std::vector<std::string> warnings;
};

struct BoundOptions {
  SolverOptions solver;
  int nagaoka_restarts = 4;
  std::uint64_t seed = 1;
};

/// Names accepted by the selector, in report order.
const std::vector<std::string>& bound_names();

/// "all" or a comma-separated list of bound names. Unknown names are a validation error.
std::vector<std::string> parse_bound_selector(std::string_view selector);

/// Computes the selected bounds. Failures are recorded per bound and never abort the others.
BoundReport compute_bounds(const StatisticalModel& model, const std::vector<std::string>& names,
                           const BoundOptions& options = {});

/// Ordering audit wrapped as a report.
BoundReport compute_verification(const StatisticalModel& model, const AuditOptions& options);

/// Pretty-printed JSON; timing fields are omitted when `timing` is false.
std::string report_to_json(const BoundReport& report, bool timing = true);
/// "bound,value,status,gap" rows.
std::string report_to_csv(const BoundReport& report);

}  // namespace qbayes
