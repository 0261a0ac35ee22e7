#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbayes/closedform.hpp"
#include "qbayes/model_io.hpp"
#include "qbayes/report.hpp"
#include "qbayes/sdpbounds.hpp"
#include "qbayes/verify.hpp"

namespace py = pybind11;
using namespace qbayes;

namespace {

std::vector<ComplexMatrix> mats(const std::vector<HermitianMatrix>& xs) {
  std::vector<ComplexMatrix> out;
  for (const auto& x : xs) out.push_back(x.mat());
  return out;
}

std::vector<HermitianMatrix> hermitians(const std::vector<ComplexMatrix>& xs) {
  std::vector<HermitianMatrix> out;
  for (const auto& x : xs) out.emplace_back(x);
  return out;
}

py::dict conic_summary(const ConicSolution& s) {
  py::dict d;
  d["status"] = std::string(to_string(s.status));
  d["gap"] = s.gap;
  d["primal_residual"] = s.primal_residual;
  d["dual_residual"] = s.dual_residual;
  d["iterations"] = s.iterations;
  return d;
}

SolverOptions solver(double gap_tol, bool predictor_corrector) {
  SolverOptions o;
  o.gap_tol = gap_tol;
  o.predictor_corrector = predictor_corrector;
  return o;
}

HolevoForm parse_form(const std::string& form) {
  if (form == "auto") return HolevoForm::automatic;
  if (form == "per_point") return HolevoForm::per_point;
  if (form == "collapsed") return HolevoForm::collapsed;
  fail(ErrorKind::validation, "form must be 'auto', 'per_point' or 'collapsed'");
}

AppendixKind parse_kind(const std::string& kind) {
  for (auto k : {AppendixKind::f_sdp, AppendixKind::f1, AppendixKind::f2, AppendixKind::f3, AppendixKind::f4,
                 AppendixKind::f5}) {
    if (to_string(k) == kind) return k;
  }
  fail(ErrorKind::validation, "unknown f-family member '" + kind + "'");
}

StatisticalModel make_model(const std::vector<RealVector>& thetas, const std::vector<double>& weights,
                            const std::vector<ComplexMatrix>& states, const std::vector<RealMatrix>& w,
                            const std::optional<std::vector<std::vector<ComplexMatrix>>>& derivatives,
                            const std::optional<std::vector<RealVector>>& scores) {
  if (thetas.size() != weights.size() || thetas.size() != states.size()) {
    fail(ErrorKind::validation, "thetas, weights and states must have the same length");
  }
  if (derivatives && derivatives->size() != thetas.size()) fail(ErrorKind::validation, "need derivatives for every point");
  std::vector<GridPoint> pts;
  for (std::size_t m = 0; m < thetas.size(); ++m) {
    GridPoint p;
    p.theta = thetas[m];
    p.weight = weights[m];
    p.state = DensityMatrix(states[m]);
    if (derivatives) p.derivatives = hermitians((*derivatives)[m]);
    pts.push_back(std::move(p));
  }
  WeightSpec spec = w.size() == 1 ? WeightSpec::constant(w.front()) : WeightSpec::per_point(w);
  return {std::move(pts), std::move(spec), scores};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayes-risk lower bounds for multiparameter quantum estimation";
  py::register_exception<Error>(m, "QbayesError", PyExc_RuntimeError);

  py::class_<StatisticalModel>(m, "Model")
      .def_property_readonly("n", &StatisticalModel::n)
      .def_property_readonly("d", &StatisticalModel::d)
      .def("__len__", &StatisticalModel::size)
      .def_property_readonly("thetas", [](const StatisticalModel& s) {
        std::vector<RealVector> out;
        for (const auto& p : s.points()) out.push_back(p.theta);
        return out;
      })
      .def_property_readonly("weights", [](const StatisticalModel& s) {
        std::vector<double> out;
        for (const auto& p : s.points()) out.push_back(p.weight);
        return out;
      })
      .def_property_readonly("states", [](const StatisticalModel& s) {
        std::vector<ComplexMatrix> out;
        for (const auto& p : s.points()) out.push_back(p.state.mat());
        return out;
      })
      .def("to_json", [](const StatisticalModel& s) { return dump_model(s); });

  m.def("make_model", &make_model, py::arg("thetas"), py::arg("weights"), py::arg("states"), py::arg("weight"),
        py::arg("derivatives") = std::nullopt, py::arg("scores") = std::nullopt,
        "Builds a model; `weight` is a list with one matrix (constant) or one per point.");
  m.def("zoo", [](const std::string& name, const std::vector<double>& params, int grid) {
    return model_zoo(name, params, grid);
  }, py::arg("name"), py::arg("params") = std::vector<double>{}, py::arg("grid") = 0);
  m.def("zoo_names", &zoo_names);
  m.def("parse_model", [](const std::string& text) { return parse_model(text); });
  m.def("load_model", [](const std::string& path) { return load_model(path); });

  m.def("moments", [](const StatisticalModel& model) {
    const BayesMoments mo = build_moments(model);
    py::dict d;
    d["s_b"] = mo.s_b.mat();
    d["d_b"] = mats(mo.d_b);
    d["m"] = mo.m;
    d["theta_bar"] = mo.theta_bar;
    d["w_bar"] = mo.w_bar;
    return d;
  });

  m.def("sld_bound", [](const StatisticalModel& model) {
    if (!model.weight().is_constant()) fail(ErrorKind::unsupported_configuration, "SLD bound requires a constant weight");
    return sld_bound(build_moments(model), model.weight().constant_matrix()).value;
  });
  m.def("rld_bound", [](const StatisticalModel& model) {
    if (!model.weight().is_constant()) fail(ErrorKind::unsupported_configuration, "RLD bound requires a constant weight");
    return rld_bound(build_moments(model), model.weight().constant_matrix()).value;
  });
  m.def("van_tree_bound", [](const StatisticalModel& model) { return van_tree_bound(model).value; });

  m.def("nagaoka_hayashi_bound", [](const StatisticalModel& model, double gap_tol, bool pc) {
    const NhSolution s = nagaoka_hayashi_bound(build_extended_moments(model), solver(gap_tol, pc));
    py::dict d;
    d["value"] = s.value;
    d["lopt"] = s.lopt.full();
    d["xopt"] = mats(s.xopt);
    d["diagnostics"] = conic_summary(s.diagnostics);
    return d;
  }, py::arg("model"), py::arg("gap_tol") = 1e-8, py::arg("predictor_corrector") = true);

  m.def("holevo_type_bound", [](const StatisticalModel& model, const std::string& form, double gap_tol, bool pc) {
    const HolevoSolution s = holevo_type_bound(build_extended_moments(model), parse_form(form), solver(gap_tol, pc));
    py::dict d;
    d["value"] = s.value;
    d["xopt"] = mats(s.xopt);
    d["v_blocks"] = s.v_blocks;
    d["diagnostics"] = conic_summary(s.diagnostics);
    return d;
  }, py::arg("model"), py::arg("form") = "auto", py::arg("gap_tol") = 1e-8, py::arg("predictor_corrector") = true);

  m.def("nagaoka_bound_search", [](const StatisticalModel& model, int restarts, std::uint64_t seed) {
    return nagaoka_bound_search(build_extended_moments(model), restarts, seed).value;
  }, py::arg("model"), py::arg("restarts") = 4, py::arg("seed") = 1);

  m.def("appendix_f", [](const std::string& kind, const std::vector<std::tuple<double, RealMatrix, ComplexMatrix>>& terms,
                         const ComplexMatrix& x, Eigen::Index n) {
    std::vector<TensorTerm> tt;
    for (const auto& [pi, w, s] : terms) tt.push_back({pi, w, DensityMatrix(s)});
    if (n < 1 || x.rows() % n != 0) fail(ErrorKind::validation, "operator size is not a multiple of n");
    return appendix_f(parse_kind(kind), tt, ExtendedOperator(n, x.rows() / n, x));
  }, py::arg("kind"), py::arg("terms"), py::arg("x"), py::arg("n") = 2,
     "terms: list of (weight, W, S); x: (n·d)×(n·d) Hermitian operator.");

  m.def("holevo_lemma_value", &holevo_lemma_value);
  m.def("holevo_lemma_sdp", [](const RealMatrix& w, const RealMatrix& a, const RealMatrix& b) {
    return holevo_lemma_sdp(w, a, b).value;
  });

  m.def("seesaw", [](const StatisticalModel& model, int outcomes, int iters, std::uint64_t seed) {
    const SeesawResult r = seesaw(model, outcomes, iters, seed);
    py::dict d;
    d["risk"] = r.best.risk;
    d["estimates"] = r.best.estimates;
    d["povm"] = mats(r.best.povm.elements);
    d["history"] = r.history;
    d["iterations"] = r.iterations;
    return d;
  }, py::arg("model"), py::arg("outcomes") = 0, py::arg("iters") = 50, py::arg("seed") = 1);

  m.def("personick_risk", [](const StatisticalModel& model) {
    return personick_optimal_measurement(build_moments(model), model.weight().constant_matrix()(0, 0)).risk;
  });

  m.def("ordering_audit", [](const StatisticalModel& model, std::vector<std::uint64_t> seeds) {
    AuditOptions opts;
    opts.seeds = std::move(seeds);
    const AuditRecord a = ordering_audit(model, opts);
    py::dict d;
    d["sld"] = a.sld;
    d["rld"] = a.rld;
    d["holevo"] = a.holevo;
    d["nh"] = a.nh;
    d["seesaw"] = a.seesaw;
    d["min_margin"] = a.min_margin();
    d["passed"] = a.passed();
    d["errors"] = a.errors;
    return d;
  }, py::arg("model"), py::arg("seeds") = std::vector<std::uint64_t>{1});

  m.def("_bounds_report_json", [](const StatisticalModel& model, const std::string& selector, int restarts,
                                  std::uint64_t seed) {
    BoundOptions opts;
    opts.nagaoka_restarts = restarts;
    opts.seed = seed;
    return report_to_json(compute_bounds(model, parse_bound_selector(selector), opts), false);
  });
}
