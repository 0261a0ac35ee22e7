#include "qbayes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qbayes/rng.hpp"
#include "qbayes/sdpbounds.hpp"

namespace qbayes {

void Povm::validate() const {
  if (elements.empty()) fail(ErrorKind::validation, "POVM has no elements");
  const Eigen::Index d = dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& e : elements) {
    if (e.dim() != d) fail(ErrorKind::validation, "POVM elements differ in dimension");
    if (min_eigenvalue(e) < -1e-10) fail(ErrorKind::validation, "POVM element is not positive semidefinite");
    total += e.mat();
  }
  if (max_abs(total - ComplexMatrix::Identity(d, d)) > 1e-9) {
    fail(ErrorKind::validation, "POVM elements do not sum to the identity");
  }
}

Povm Povm::trivial(Eigen::Index d) { return Povm{{HermitianMatrix::identity(d)}}; }

namespace {

void require_constant_weight(const StatisticalModel& model, const char* what) {
  if (!model.weight().is_constant()) {
    fail(ErrorKind::unsupported_configuration, std::string(what) + " requires a constant weight matrix");
  }
}

// p(x|m) = Tr(S_m Π_x)
RealMatrix outcome_probabilities(const StatisticalModel& model, const Povm& povm) {
  RealMatrix p(static_cast<Eigen::Index>(model.size()), static_cast<Eigen::Index>(povm.size()));
  for (std::size_t m = 0; m < model.size(); ++m) {
    for (std::size_t x = 0; x < povm.size(); ++x) {
      p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x)) =
          (model.point(m).state.mat() * povm.elements[x].mat()).trace().real();
    }
  }
  return p;
}

// Projects near-POVM solver output onto an exact resolution of the identity.
Povm clean_povm(const std::vector<ComplexMatrix>& raw) {
  const Eigen::Index d = raw.front().rows();
  std::vector<HermitianMatrix> clamped;
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& r : raw) {
    clamped.push_back(spectral_apply(HermitianMatrix(r), [](double v) { return std::max(v, 0.0); }));
    total += clamped.back().mat();
  }
  if (min_eigenvalue(HermitianMatrix(total)) <= 1e-12 * std::max(1.0, total.trace().real())) {
    fail(ErrorKind::numerical_failure, "POVM elements do not span the Hilbert space");
  }
  const HermitianMatrix inv_sqrt = spectral_apply(HermitianMatrix(total), [](double v) { return 1.0 / std::sqrt(v); });
  Povm out;
  for (const auto& c : clamped) out.elements.emplace_back(ComplexMatrix(inv_sqrt.mat() * c.mat() * inv_sqrt.mat()));
  return out;
}

Povm haar_povm(Rng& rng, Eigen::Index d, int outcomes) {
  std::vector<ComplexMatrix> raw;
  // Rank ⌈d / outcomes⌉ per element so the elements span H even with few outcomes.
  const Eigen::Index rank = std::max<Eigen::Index>(1, (d + outcomes - 1) / outcomes);
  for (int x = 0; x < outcomes; ++x) {
    ComplexMatrix g(d, rank);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = cplx(rng.normal(), rng.normal());
    raw.push_back(g * g.adjoint());
  }
  return clean_povm(raw);
}

}  // namespace

double grid_risk(const StatisticalModel& model, const Povm& povm, const std::vector<RealVector>& estimates) {
  if (estimates.size() != povm.size()) fail(ErrorKind::validation, "need one estimate per POVM outcome");
  for (const auto& e : estimates) {
    if (e.size() != model.n()) fail(ErrorKind::validation, "estimate has wrong length");
  }
  const RealMatrix p = outcome_probabilities(model, povm);
  double risk = 0.0;
  for (std::size_t m = 0; m < model.size(); ++m) {
    const GridPoint& pt = model.point(m);
    if (pt.weight == 0.0) continue;
    const RealMatrix& w = model.weight().at(m);
    double inner = 0.0;
    for (std::size_t x = 0; x < povm.size(); ++x) {
      const RealVector diff = estimates[x] - pt.theta;
      inner += p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x)) * diff.dot(w * diff);
    }
    risk += pt.weight * inner;
  }
  return risk;
}

DecisionRisk posterior_mean_estimator(const StatisticalModel& model, const Povm& povm) {
  require_constant_weight(model, "posterior-mean estimator");
  povm.validate();
  if (povm.dim() != model.d()) fail(ErrorKind::validation, "POVM dimension differs from the model");
  const RealMatrix p = outcome_probabilities(model, povm);
  RealVector prior_mean = RealVector::Zero(model.n());
  for (const auto& pt : model.points()) prior_mean += pt.weight * pt.theta;

  DecisionRisk out;
  out.povm = povm;
  for (std::size_t x = 0; x < povm.size(); ++x) {
    double px = 0.0;
    RealVector acc = RealVector::Zero(model.n());
    for (std::size_t m = 0; m < model.size(); ++m) {
      const double joint = model.point(m).weight * p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x));
      px += joint;
      acc += joint * model.point(m).theta;
    }
    out.estimates.push_back(px > 1e-15 ? RealVector(acc / px) : prior_mean);
  }
  out.risk = grid_risk(model, povm, out.estimates);
  return out;
}

Povm optimal_povm_step(const StatisticalModel& model, const std::vector<RealVector>& estimates,
                       const SolverOptions& options) {
  require_constant_weight(model, "POVM optimization");
  if (estimates.empty()) fail(ErrorKind::validation, "need at least one outcome");
  const Eigen::Index d = model.d();
  const RealMatrix& w = model.weight().constant_matrix();

  ConicProgram prog;
  for (std::size_t x = 0; x < estimates.size(); ++x) {
    if (estimates[x].size() != model.n()) fail(ErrorKind::validation, "estimate has wrong length");
    const std::size_t blk = prog.add_block(BlockKind::complex_hermitian, d);
    ComplexMatrix cost = ComplexMatrix::Zero(d, d);
    for (const auto& pt : model.points()) {
      const RealVector diff = estimates[x] - pt.theta;
      cost += pt.weight * diff.dot(w * diff) * pt.state.mat();
    }
    prog.objective().add_matrix(blk, cost);
  }
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  for (const auto& b : hermitian_basis(d)) {
    LinearFunctional lhs;
    for (std::size_t x = 0; x < estimates.size(); ++x) lhs.add_matrix(x, b);
    prog.add_constraint(std::move(lhs), (b * eye).trace().real());
  }
  const ConicSolution sol = solve(prog, options);
  if (!sol.optimal()) {
    std::ostringstream os;
    os << "POVM optimization ended with status " << to_string(sol.status) << " after " << sol.iterations
       << " iterations";
    fail(ErrorKind::solver_failure, os.str());
  }
  return clean_povm(sol.blocks);
}

SeesawResult seesaw(const StatisticalModel& model, int outcome_count, int iters, std::uint64_t seed,
                    const SolverOptions& options) {
  require_constant_weight(model, "seesaw");
  if (outcome_count < 0 || iters < 1) fail(ErrorKind::validation, "seesaw needs a positive iteration count");
  const int outcomes = outcome_count == 0 ? static_cast<int>(model.n()) + 2 : outcome_count;
  Rng rng(seed);

  SeesawResult out;
  out.best = posterior_mean_estimator(model, haar_povm(rng, model.d(), outcomes));
  out.history.push_back(out.best.risk);
  for (int it = 1; it <= iters; ++it) {
    out.iterations = it;
    if (out.best.risk <= 0.0) break;
    const Povm next = optimal_povm_step(model, out.best.estimates, options);
    DecisionRisk cand = posterior_mean_estimator(model, next);
    const double improvement = out.best.risk - cand.risk;
    if (improvement <= 0.0) break;
    out.best = std::move(cand);
    out.history.push_back(out.best.risk);
    if (improvement < 1e-10) break;
  }
  return out;
}

DecisionRisk personick_optimal_measurement(const BayesMoments& moments, double w) {
  if (moments.d_b.size() != 1) fail(ErrorKind::capability, "Personick measurement is defined for one parameter only");
  if (min_eigenvalue(moments.s_b.hermitian()) <= kDefaultTolerances.strictly_positive) {
    fail(ErrorKind::singular_state, "Personick measurement needs a strictly positive averaged state");
  }
  const HermitianMatrix l = lyapunov_solve(moments.s_b, moments.d_b.front()).solution;
  const EigenSystem es = hermitian_eig(l);
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());

  DecisionRisk out;
  const Eigen::Index d = l.dim();
  for (Eigen::Index i = 0; i < d;) {
    Eigen::Index j = i + 1;
    while (j < d && es.values(j) - es.values(i) <= 1e-9 * scale) ++j;
    const ComplexMatrix v = es.vectors.middleCols(i, j - i);
    out.povm.elements.emplace_back(ComplexMatrix(v * v.adjoint()));
    out.estimates.push_back(RealVector::Constant(1, es.values.segment(i, j - i).mean()));
    i = j;
  }
  // Σ_x [θ̂_x² Tr(S_B Π_x) − 2θ̂_x Tr(D_B Π_x)] + m, times w
  double risk = moments.m(0, 0);
  for (std::size_t x = 0; x < out.povm.size(); ++x) {
    const double t = out.estimates[x](0);
    const ComplexMatrix& pi = out.povm.elements[x].mat();
    risk += t * t * (moments.s_b.mat() * pi).trace().real() - 2.0 * t * (moments.d_b.front().mat() * pi).trace().real();
  }
  out.risk = w * risk;
  return out;
}

// ---------------------------------------------------------------------------

bool AuditRecord::passed(double slack) const { return errors.empty() && min_margin() >= -slack; }

double AuditRecord::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : {margin_seesaw_nh, margin_nh_holevo, margin_holevo_sld, margin_holevo_rld}) {
    if (v) m = std::min(m, *v);
  }
  return m;
}

AuditRecord ordering_audit(const StatisticalModel& model, const AuditOptions& options) {
  require_constant_weight(model, "ordering audit");
  const RealMatrix& w = model.weight().constant_matrix();
  if (min_eigenvalue(w) <= 1e-10) fail(ErrorKind::unsupported_configuration, "ordering audit needs W strictly positive");

  AuditRecord rec;
  auto guarded = [&](const char* name, auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      rec.errors.push_back(std::string(name) + ": " + e.what());
      return std::nullopt;
    }
  };
  const BayesMoments mo = build_moments(model);
  const ExtendedMoments em = build_extended_moments(model);
  rec.sld = guarded("sld", [&] {
    const SldBound b = sld_bound(mo, w);
    rec.warnings.insert(rec.warnings.end(), b.warnings.begin(), b.warnings.end());
    return b.value;
  });
  rec.rld = guarded("rld", [&] {
    const RldBound b = rld_bound(mo, w);
    rec.warnings.insert(rec.warnings.end(), b.warnings.begin(), b.warnings.end());
    return b.value;
  });
  rec.holevo = guarded("holevo", [&] { return holevo_type_bound(em, HolevoForm::automatic, options.solver).value; });
  rec.nh = guarded("nh", [&] { return nagaoka_hayashi_bound(em, options.solver).value; });
  if (options.seeds.empty()) fail(ErrorKind::validation, "ordering audit needs at least one seesaw seed");
  rec.seesaw = guarded("seesaw", [&] {
    double best = std::numeric_limits<double>::infinity();
    for (const auto s : options.seeds) {
      rec.seesaw_runs.push_back(seesaw(model, options.outcome_count, options.seesaw_iters, s, options.solver).best.risk);
      best = std::min(best, rec.seesaw_runs.back());
    }
    return best;
  });
  auto diff = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
    if (a && b) return *a - *b;
    return std::nullopt;
  };
  rec.margin_seesaw_nh = diff(rec.seesaw, rec.nh);
  rec.margin_nh_holevo = diff(rec.nh, rec.holevo);
  rec.margin_holevo_sld = diff(rec.holevo, rec.sld);
  rec.margin_holevo_rld = diff(rec.holevo, rec.rld);
  return rec;
}

// ---------------------------------------------------------------------------

std::vector<LemmaCheck> lemma_suite(std::uint64_t seed, int trials, const SolverOptions& options) {
  if (trials < 1) fail(ErrorKind::validation, "trial count must be positive");
  Rng rng(seed);
  LemmaCheck eq{"f_sdp = f1"}, c2{"f_sdp >= f2"}, c3{"f_sdp >= f3"}, c4{"f3 >= f4"}, c5{"f_sdp >= f5"},
      ho{"holevo lemma"};

  auto record = [](LemmaCheck& c, double violation, double tol) {
    c.worst = std::max(c.worst, violation);
    (violation <= tol ? c.passed : c.failed)++;
  };
  auto random_x = [&](Eigen::Index n, Eigen::Index d) {
    ComplexMatrix a(n * d, n * d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(rng.normal(), rng.normal());
    return ExtendedOperator(n, d, 0.5 * (a + a.adjoint()));
  };

  for (int t = 0; t < trials; ++t) {
    const Eigen::Index d = 2 + t % 3;
    // single tensor term, n = 2
    {
      const std::vector<TensorTerm> one{{1.0, random_spd(rng, 2), random_state(rng, d)}};
      const ExtendedOperator x = random_x(2, d);
      const double fs = appendix_f(AppendixKind::f_sdp, one, x, options);
      const double f1 = appendix_f(AppendixKind::f1, one, x, options);
      const double f2 = appendix_f(AppendixKind::f2, one, x, options);
      record(eq, std::abs(fs - f1) / std::max(1.0, std::abs(f1)), 1e-6);
      record(c2, f2 - fs, 1e-7);
    }
    // convex mixture of tensor terms, n = 2
    {
      const int k = 2 + t % 2;
      std::vector<TensorTerm> terms;
      double total = 0.0;
      for (int j = 0; j < k; ++j) {
        terms.push_back({0.2 + rng.uniform(), random_spd(rng, 2), random_state(rng, d)});
        total += terms.back().weight;
      }
      for (auto& term : terms) term.weight /= total;
      const ExtendedOperator x = random_x(2, d);
      const double fs = appendix_f(AppendixKind::f_sdp, terms, x, options);
      const double f3 = appendix_f(AppendixKind::f3, terms, x, options);
      const double f4 = appendix_f(AppendixKind::f4, terms, x, options);
      const double f5 = appendix_f(AppendixKind::f5, terms, x, options);
      record(c3, f3 - fs, 1e-7);
      record(c4, f4 - f3, 1e-7);
      record(c5, f5 - fs, 1e-7);
    }
    // Holevo lemma
    {
      const Eigen::Index n = 2 + t % 3;
      const RealMatrix w = random_spd(rng, n);
      RealMatrix g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
      const RealMatrix a = 0.5 * (g + g.transpose());
      g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
      const RealMatrix b = 0.5 * (g - g.transpose());
      const double closed = holevo_lemma_value(w, a, b);
      const double sdp = holevo_lemma_sdp(w, a, b, options).value;
      record(ho, std::abs(closed - sdp), 1e-7);
    }
  }
  return {eq, c2, c3, c4, c5, ho};
}

}  // namespace qbayes
