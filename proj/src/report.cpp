#include "qbayes/report.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "qbayes/closedform.hpp"
#include "qbayes/sdpbounds.hpp"

namespace qbayes {

const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names{"sld", "rld", "vantree", "holevo", "nh", "nagaoka2"};
  return names;
}

std::vector<std::string> parse_bound_selector(std::string_view selector) {
  if (selector == "all") return bound_names();
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= selector.size()) {
    const std::size_t end = std::min(selector.find(',', start), selector.size());
    const std::string name(selector.substr(start, end - start));
    if (name == "all") return bound_names();
    if (std::find(bound_names().begin(), bound_names().end(), name) == bound_names().end()) {
      fail(ErrorKind::validation, "unknown bound selector '" + name + "'");
    }
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    start = end + 1;
  }
  return out;
}

namespace {

struct Computed {
  double value = 0.0;
  std::string status;
  double gap = 0.0;
  std::vector<std::string> warnings;
};

Computed from_conic(double value, const ConicSolution& sol) {
  Computed c{value, std::string(to_string(sol.status)), sol.gap, {}};
  if (sol.gap > 1e-8 * std::max(1.0, std::abs(value))) {
    c.warnings.emplace_back("duality gap exceeds 1e-8 relative to the reported value");
  }
  return c;
}

const RealMatrix& constant_weight(const StatisticalModel& model, const char* what) {
  if (!model.weight().is_constant()) {
    fail(ErrorKind::unsupported_configuration, std::string(what) + " requires a constant weight matrix");
  }
  return model.weight().constant_matrix();
}

BoundEntry run(const std::string& name, const std::function<Computed()>& fn) {
  BoundEntry e;
  e.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Computed c = fn();
    e.value = c.value;
    e.solver_status = std::move(c.status);
    e.gap = c.gap;
    e.warnings = std::move(c.warnings);
  } catch (const Error& err) {
    e.solver_status = "error";
    e.error = err.what();
    e.error_kind = err.kind();
  }
  e.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return e;
}

}  // namespace

BoundReport compute_bounds(const StatisticalModel& model, const std::vector<std::string>& names,
                           const BoundOptions& options) {
  BoundReport report;
  const BayesMoments mo = build_moments(model);
  const ExtendedMoments em = build_extended_moments(model);
  for (const auto& name : names) {
    std::function<Computed()> fn;
    if (name == "sld") {
      fn = [&] {
        const SldBound b = sld_bound(mo, constant_weight(model, "SLD bound"));
        return Computed{b.value, "closed_form", 0.0, b.warnings};
      };
    } else if (name == "rld") {
      fn = [&] {
        const RldBound b = rld_bound(mo, constant_weight(model, "RLD bound"));
        return Computed{b.value, "closed_form", 0.0, b.warnings};
      };
    } else if (name == "vantree") {
      fn = [&] {
        const VanTreeBound b = van_tree_bound(model);
        return Computed{b.value, "closed_form", 0.0, b.warnings};
      };
    } else if (name == "holevo") {
      fn = [&] {
        const HolevoSolution s = holevo_type_bound(em, HolevoForm::automatic, options.solver);
        return from_conic(s.value, s.diagnostics);
      };
    } else if (name == "nh") {
      fn = [&] {
        const NhSolution s = nagaoka_hayashi_bound(em, options.solver);
        return from_conic(s.value, s.diagnostics);
      };
    } else if (name == "nagaoka2") {
      fn = [&] {
        const NagaokaSearchResult s = nagaoka_bound_search(em, options.nagaoka_restarts, options.seed);
        return Computed{s.value, "heuristic", 0.0,
                        {"best value found by local search; an upper bound on the two-parameter minimum, "
                         "not a certified lower bound"}};
      };
    } else {
      fail(ErrorKind::validation, "unknown bound '" + name + "'");
    }
    report.bounds.push_back(run(name, fn));
    for (const auto& w : report.bounds.back().warnings) report.warnings.push_back(name + ": " + w);
  }
  return report;
}

BoundReport compute_verification(const StatisticalModel& model, const AuditOptions& options) {
  BoundReport report;
  report.audit = ordering_audit(model, options);
  for (const auto& w : report.audit->warnings) report.warnings.push_back(w);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string report_to_json(const BoundReport& report, bool timing) {
  nlohmann::ordered_json j;
  j["model_digest"] = report.model_digest;
  nlohmann::ordered_json bounds = nlohmann::ordered_json::object();
  for (const auto& b : report.bounds) {
    nlohmann::ordered_json e;
    e["value"] = optional_number(b.value);
    e["solver_status"] = b.solver_status;
    e["gap"] = b.gap;
    if (timing) e["wall_time_ms"] = b.wall_time_ms;
    if (b.error_kind) {
      e["error"] = b.error;
      e["error_kind"] = std::string(to_string(*b.error_kind));
    }
    if (!b.warnings.empty()) e["warnings"] = b.warnings;
    bounds[b.name] = std::move(e);
  }
  j["bounds"] = std::move(bounds);
  if (report.audit) {
    const AuditRecord& a = *report.audit;
    nlohmann::ordered_json audit;
    audit["values"] = {{"sld", optional_number(a.sld)},       {"rld", optional_number(a.rld)},
                       {"holevo", optional_number(a.holevo)}, {"nh", optional_number(a.nh)},
                       {"seesaw", optional_number(a.seesaw)}};
    audit["margins"] = {{"seesaw_minus_nh", optional_number(a.margin_seesaw_nh)},
                        {"nh_minus_holevo", optional_number(a.margin_nh_holevo)},
                        {"holevo_minus_sld", optional_number(a.margin_holevo_sld)},
                        {"holevo_minus_rld", optional_number(a.margin_holevo_rld)}};
    audit["seesaw_runs"] = a.seesaw_runs;
    audit["passed"] = a.passed();
    audit["errors"] = a.errors;
    j["audit"] = std::move(audit);
  } else {
    j["audit"] = nullptr;
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const BoundReport& report) {
  std::ostringstream os;
  os << std::setprecision(17) << "bound,value,status,gap\n";
  for (const auto& b : report.bounds) {
    os << b.name << ',';
    if (b.value) os << *b.value;
    os << ',' << b.solver_status << ',' << b.gap << '\n';
  }
  if (report.audit) {
    const AuditRecord& a = *report.audit;
    const std::pair<const char*, std::optional<double>> rows[] = {
        {"audit_sld", a.sld}, {"audit_rld", a.rld}, {"audit_holevo", a.holevo}, {"audit_nh", a.nh}, {"audit_seesaw", a.seesaw}};
    for (const auto& [name, v] : rows) {
      os << name << ',';
      if (v) os << *v;
      os << ",audit,0\n";
    }
  }
  return os.str();
}

}  // namespace qbayes
