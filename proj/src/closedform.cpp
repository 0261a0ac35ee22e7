#include "qbayes/closedform.hpp"

#include <cmath>
#include <sstream>

namespace qbayes {

namespace {

void check_weight(const RealMatrix& w, Eigen::Index n) {
  if (w.rows() != n || w.cols() != n) fail(ErrorKind::validation, "weight matrix size differs from parameter count");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::validation, "weight matrix is not symmetric");
  if (min_eigenvalue(w) < -1e-10) fail(ErrorKind::validation, "weight matrix is not positive semidefinite");
}

void check_moments(const BayesMoments& mo) {
  const auto n = static_cast<Eigen::Index>(mo.d_b.size());
  if (n == 0) fail(ErrorKind::validation, "moments carry no parameters");
  if (mo.m.rows() != n || mo.m.cols() != n) fail(ErrorKind::validation, "second-moment matrix has wrong size");
  for (const auto& d : mo.d_b) {
    if (d.dim() != mo.s_b.dim()) fail(ErrorKind::validation, "first-moment operator has wrong dimension");
  }
}

const char* kRegularizedWarning = "averaged state was numerically singular and has been regularized";

}  // namespace

SldBound sld_bound(const BayesMoments& mo, const RealMatrix& w, const Tolerances& tol) {
  check_moments(mo);
  const auto n = static_cast<Eigen::Index>(mo.d_b.size());
  check_weight(w, n);
  const auto [state, regularized] = regularize(mo.s_b, tol);

  SldBound out;
  out.package.regularized = regularized;
  for (const auto& d : mo.d_b) out.package.l.push_back(lyapunov_solve(state, d, tol).solution);
  RealMatrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const ComplexMatrix prod = out.package.l[i].mat() * out.package.l[j].mat();
      k(i, j) = k(j, i) = (state.mat() * prod).trace().real();
    }
  }
  out.package.k = k;
  out.value = (w * (mo.m - k)).trace();
  if (regularized) out.warnings.emplace_back(kRegularizedWarning);
  return out;
}

RldBound rld_bound(const BayesMoments& mo, const RealMatrix& w, const Tolerances& tol) {
  check_moments(mo);
  const auto n = static_cast<Eigen::Index>(mo.d_b.size());
  check_weight(w, n);
  const auto [state, regularized] = regularize(mo.s_b, tol);
  const ComplexMatrix sinv = hermitian_inverse(state.hermitian()).mat();

  RldBound out;
  out.package.regularized = regularized;
  for (const auto& d : mo.d_b) out.package.ltilde.push_back(sinv * d.mat());
  ComplexMatrix kt(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Tr(S L̃_k L̃_j†) = Tr(D_k D_j S⁻¹)
      kt(j, k) = (mo.d_b[k].mat() * mo.d_b[j].mat() * sinv).trace();
    }
  }
  kt = 0.5 * (kt + kt.adjoint()).eval();
  out.package.ktilde = kt;

  const RealMatrix re = kt.real();
  RealMatrix im = kt.imag();
  im = 0.5 * (im - im.transpose()).eval();
  double tabs = 0.0;
  if (min_eigenvalue(w) > tol.strictly_positive) {
    tabs = trace_abs_congruence(w, im, tol);
  } else {
    out.warnings.emplace_back("weight matrix is singular; trace-abs term computed with the general eigensolver");
    try {
      tabs = trace_abs((w * im).cast<cplx>(), tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ill_conditioned) throw;
      out.warnings.emplace_back("eigensolver path ill-conditioned; used the congruence formula instead");
      tabs = trace_abs_congruence(w, im, tol);
    }
  }
  out.value = (w * (mo.m - re)).trace() + tabs;
  if (regularized) out.warnings.emplace_back(kRegularizedWarning);
  return out;
}

RealMatrix sld_fisher_point(const DensityMatrix& state, const std::vector<HermitianMatrix>& derivatives,
                            const Tolerances& tol) {
  const auto n = static_cast<Eigen::Index>(derivatives.size());
  if (n == 0) fail(ErrorKind::validation, "no state derivatives given");
  for (const auto& d : derivatives) {
    if (d.dim() != state.dim()) fail(ErrorKind::validation, "state derivative has wrong dimension");
    if (std::abs(d.trace()) > 1e-9) fail(ErrorKind::validation, "state derivative is not traceless");
  }
  if (min_eigenvalue(state.hermitian()) < tol.strictly_positive) {
    fail(ErrorKind::singular_state, "Fisher information needs a strictly positive state");
  }
  std::vector<HermitianMatrix> l;
  for (const auto& d : derivatives) l.push_back(lyapunov_solve(state, d, tol).solution);
  RealMatrix j(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a <= b; ++a) {
      j(a, b) = j(b, a) = (state.mat() * l[a].mat() * l[b].mat()).trace().real();
    }
  }
  return j;
}

VanTreeBound van_tree_bound(const StatisticalModel& model, const RealMatrix& w, const Tolerances& tol) {
  if (!model.has_derivatives()) {
    fail(ErrorKind::capability, "van Tree bound needs state derivatives on every grid point (missing derivatives)");
  }
  if (!model.prior_score()) fail(ErrorKind::capability, "van Tree bound needs prior scores (missing score)");
  const Eigen::Index n = model.n();
  check_weight(w, n);

  VanTreeBound out;
  out.prior_information = RealMatrix::Zero(n, n);
  RealMatrix quantum = RealMatrix::Zero(n, n);
  for (std::size_t m = 0; m < model.size(); ++m) {
    const GridPoint& p = model.point(m);
    const RealVector& score = (*model.prior_score())[m];
    out.prior_information += p.weight * score * score.transpose();
    if (p.weight > 0.0) quantum += p.weight * sld_fisher_point(p.state, *p.derivatives, tol);
  }
  out.information = out.prior_information + quantum;
  out.information = 0.5 * (out.information + out.information.transpose()).eval();
  const double scale = std::max(1.0, out.information.cwiseAbs().maxCoeff());
  if (min_eigenvalue(out.information) <= 1e-12 * scale) {
    fail(ErrorKind::singular_information, "Bayesian Fisher information is singular");
  }
  out.value = (w * out.information.inverse()).trace();
  out.warnings.emplace_back("van Tree value uses the grid surrogate with user-supplied prior scores");
  return out;
}

VanTreeBound van_tree_bound(const StatisticalModel& model, const Tolerances& tol) {
  if (!model.weight().is_constant()) {
    fail(ErrorKind::unsupported_configuration, "van Tree bound requires a constant weight matrix");
  }
  return van_tree_bound(model, model.weight().constant_matrix(), tol);
}

}  // namespace qbayes
