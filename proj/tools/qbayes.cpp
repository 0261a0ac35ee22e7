// qbayes: command-line front end.
//
//   qbayes bounds --model m.json [--bounds all|nh,holevo,...] [--out r.json] [--csv r.csv]
//   qbayes verify --model m.json [--iters N] [--seeds 1,2,3] [--out r.json]
//   qbayes zoo <name> [params...] [--grid N] [--out m.json]
//   qbayes lemmas [--seed S] [--trials T]
//
// Exit codes: 0 success, 2 invalid input, 3 solver failure or bound violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qbayes/model_io.hpp"
#include "qbayes/report.hpp"
#include "qbayes/verify.hpp"

namespace {

using namespace qbayes;

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kFailure = 3;

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::solver_failure || kind == ErrorKind::numerical_failure ? kFailure : kInvalid;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::validation, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::validation, "cannot write '" + path + "'");
  out << text;
}

SolverOptions solver_from_env() {
  SolverOptions opts;
  if (const char* env = std::getenv("QBAYES_GAP_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) fail(ErrorKind::validation, "QBAYES_GAP_TOL must be a positive number");
    opts.gap_tol = v;
  }
  return opts;
}

struct LoadedModel {
  StatisticalModel model;
  std::string digest;
};

LoadedModel load(const std::string& path) {
  const std::string text = read_file(path);
  return {parse_model(text), sha256_hex(text)};
}

struct BoundsArgs {
  std::string model, selector = "all", out, csv;
  int restarts = 4;
  std::uint64_t seed = 1;
  bool no_timing = false;
};

int cmd_bounds(const BoundsArgs& a) {
  const std::vector<std::string> names = parse_bound_selector(a.selector);
  BoundOptions opts;
  opts.solver = solver_from_env();
  opts.nagaoka_restarts = a.restarts;
  opts.seed = a.seed;
  auto [model, digest] = load(a.model);
  BoundReport report = compute_bounds(model, names, opts);
  report.model_digest = digest;
  write_output(a.out, report_to_json(report, !a.no_timing));
  if (!a.csv.empty()) write_output(a.csv, report_to_csv(report));

  bool any_value = false;
  bool solver_failed = false;
  for (const auto& b : report.bounds) {
    if (b.value) any_value = true;
    if (b.error_kind) {
      std::cerr << "qbayes: " << b.name << ": " << b.error << '\n';
      if (exit_code_for(*b.error_kind) == kFailure) solver_failed = true;
    }
  }
  if (solver_failed) return kFailure;
  return any_value ? kOk : kInvalid;
}

struct VerifyArgs {
  std::string model, out, csv;
  int iters = 50;
  int outcomes = 0;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  bool no_timing = false;
};

int cmd_verify(const VerifyArgs& a) {
  AuditOptions opts;
  opts.solver = solver_from_env();
  opts.seesaw_iters = a.iters;
  opts.seeds = a.seeds;
  opts.outcome_count = a.outcomes;
  auto [model, digest] = load(a.model);
  BoundReport report = compute_verification(model, opts);
  report.model_digest = digest;
  write_output(a.out, report_to_json(report, !a.no_timing));
  if (!a.csv.empty()) write_output(a.csv, report_to_csv(report));
  const AuditRecord& audit = *report.audit;
  for (const auto& e : audit.errors) std::cerr << "qbayes: " << e << '\n';
  if (!audit.passed()) {
    std::cerr << "qbayes: ordering audit failed (smallest margin " << audit.min_margin() << ")\n";
    return kFailure;
  }
  return kOk;
}

struct ZooArgs {
  std::string name, out;
  std::vector<double> params;
  int grid = 0;
};

int cmd_zoo(const ZooArgs& a) {
  const StatisticalModel model = model_zoo(a.name, a.params, a.grid);
  write_output(a.out, dump_model(model));
  return kOk;
}

struct LemmaArgs {
  std::uint64_t seed = 1;
  int trials = 20;
};

int cmd_lemmas(const LemmaArgs& a) {
  bool ok = true;
  for (const auto& c : lemma_suite(a.seed, a.trials, solver_from_env())) {
    std::cout << c.name << ": passed " << c.passed << " failed " << c.failed << " (worst " << c.worst << ")\n";
    ok = ok && c.failed == 0;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian multiparameter quantum estimation bounds"};
  app.require_subcommand(1);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "compute lower bounds for a model file");
  bounds->add_option("--model", ba.model, "model JSON file")->required();
  bounds->add_option("--bounds", ba.selector, "all, or a comma list of sld,rld,vantree,holevo,nh,nagaoka2");
  bounds->add_option("--out", ba.out, "report path (stdout if omitted)");
  bounds->add_option("--csv", ba.csv, "also write bound values as CSV");
  bounds->add_option("--restarts", ba.restarts, "restarts for the two-parameter Nagaoka search")->check(CLI::NonNegativeNumber);
  bounds->add_option("--seed", ba.seed, "seed for the two-parameter Nagaoka search");
  bounds->add_flag("--no-timing", ba.no_timing, "omit wall-time fields");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "ordering audit and seesaw certification");
  verify->add_option("--model", va.model, "model JSON file")->required();
  verify->add_option("--iters", va.iters, "seesaw iterations per seed")->check(CLI::PositiveNumber);
  verify->add_option("--seeds", va.seeds, "seesaw seeds")->delimiter(',');
  verify->add_option("--outcomes", va.outcomes, "POVM outcome count (0 selects n + 2)")->check(CLI::NonNegativeNumber);
  verify->add_option("--out", va.out, "report path (stdout if omitted)");
  verify->add_option("--csv", va.csv, "also write values as CSV");
  verify->add_flag("--no-timing", va.no_timing, "omit wall-time fields");

  ZooArgs za;
  auto* zoo = app.add_subcommand("zoo", "write a built-in model as JSON");
  zoo->add_option("name", za.name, "generator name")->required();
  zoo->add_option("params", za.params, "generator parameters");
  zoo->add_option("--grid", za.grid, "grid size for generators that take one");
  zoo->add_option("--out", za.out, "model path (stdout if omitted)");

  LemmaArgs la;
  auto* lemmas = app.add_subcommand("lemmas", "random-instance checks of the operator-inequality lemmas");
  lemmas->add_option("--seed", la.seed, "seed");
  lemmas->add_option("--trials", la.trials, "instances per check")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*bounds) return cmd_bounds(ba);
    if (*verify) return cmd_verify(va);
    if (*zoo) return cmd_zoo(za);
    if (*lemmas) return cmd_lemmas(la);
  } catch (const Error& e) {
    std::cerr << "qbayes: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "qbayes: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
