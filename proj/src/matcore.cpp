#include "qbayes/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbayes {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::not_psd: return "not-psd";
    case ErrorKind::singular_state: return "singular-state";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::empty_model: return "empty-model";
    case ErrorKind::capability: return "capability";
    case ErrorKind::unsupported_configuration: return "unsupported-configuration";
    case ErrorKind::singular_information: return "singular-information";
    case ErrorKind::solver_failure: return "solver-failure";
  }
  return "unknown";
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag())) return false;
  }
  return true;
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// HermitianMatrix / DensityMatrix

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::validation, "Hermitian matrix must be square");
  if (!all_finite(a)) fail(ErrorKind::validation, "matrix has non-finite entries");
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix(ComplexMatrix::Zero(dim, dim)));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix(ComplexMatrix::Identity(dim, dim)));
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  HermitianMatrix r;
  r.m_ = a.m_ + b.m_;
  return r;
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  HermitianMatrix r;
  r.m_ = a.m_ - b.m_;
  return r;
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  HermitianMatrix r;
  r.m_ = s * a.m_;
  return r;
}

DensityMatrix::DensityMatrix(const ComplexMatrix& rho, const Tolerances& tol)
    : DensityMatrix(HermitianMatrix(rho), tol) {}

DensityMatrix::DensityMatrix(const HermitianMatrix& rho, const Tolerances& tol) : h_(rho) {
  if (h_.dim() == 0) fail(ErrorKind::validation, "density matrix has dimension 0");
  const double tr = h_.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    fail(ErrorKind::validation, os.str());
  }
  const double lmin = min_eigenvalue(h_);
  if (lmin < -tol.density_eigenvalue) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lmin;
    fail(ErrorKind::not_psd, os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(ComplexMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

// ---------------------------------------------------------------------------
// Spectral calculus

EigenSystem hermitian_eig(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::numerical_failure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::numerical_failure, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double min_eigenvalue(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return hermitian_eigenvalues(a)(0);
}

double min_eigenvalue(const RealMatrix& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  const RealMatrix sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::numerical_failure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, const Tolerances& tol) {
  const EigenSystem es = hermitian_eig(a);
  if (es.values.size() > 0 && es.values(0) < -tol.psd_clamp) {
    std::ostringstream os;
    os << "psd_sqrt: eigenvalue " << es.values(0) << " below -" << tol.psd_clamp;
    fail(ErrorKind::not_psd, os.str());
  }
  const RealVector roots = es.values.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix(ComplexMatrix(es.vectors * roots.cast<cplx>().asDiagonal() * es.vectors.adjoint()));
}

RealMatrix psd_sqrt(const RealMatrix& symmetric, const Tolerances& tol) {
  const RealMatrix sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::numerical_failure, "symmetric eigensolver did not converge");
  }
  if (solver.eigenvalues().size() > 0 && solver.eigenvalues()(0) < -tol.psd_clamp) {
    std::ostringstream os;
    os << "psd_sqrt: eigenvalue " << solver.eigenvalues()(0) << " below -" << tol.psd_clamp;
    fail(ErrorKind::not_psd, os.str());
  }
  const RealVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const RealMatrix r = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

HermitianMatrix hermitian_inverse(const HermitianMatrix& a) {
  const EigenSystem es = hermitian_eig(a);
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  if (es.values.cwiseAbs().minCoeff() <= 1e-14 * scale) {
    fail(ErrorKind::singular_state, "matrix is numerically singular");
  }
  const RealVector inv = es.values.cwiseInverse();
  return HermitianMatrix(ComplexMatrix(es.vectors * inv.cast<cplx>().asDiagonal() * es.vectors.adjoint()));
}

RegularizedState regularize(const DensityMatrix& s, const Tolerances& tol) {
  const double lmin = min_eigenvalue(s.hermitian());
  if (lmin < -tol.psd_clamp) {
    std::ostringstream os;
    os << "state has eigenvalue " << lmin << ", not positive semidefinite";
    fail(ErrorKind::not_psd, os.str());
  }
  if (lmin >= tol.strictly_positive) return {s, false};
  const auto d = static_cast<double>(s.dim());
  const double eps = tol.regularization;
  ComplexMatrix mixed = (1.0 - eps) * s.mat();
  mixed.diagonal().array() += eps / d;
  DensityMatrix out(mixed, tol);
  if (min_eigenvalue(out.hermitian()) <= 0.0) {
    fail(ErrorKind::singular_state, "state remains singular after regularization");
  }
  return {std::move(out), true};
}

LyapunovSolution lyapunov_solve(const DensityMatrix& s, const HermitianMatrix& d, const Tolerances& tol) {
  if (s.dim() != d.dim()) fail(ErrorKind::validation, "lyapunov_solve: dimension mismatch");
  auto [state, regularized] = regularize(s, tol);
  const EigenSystem es = hermitian_eig(state.hermitian());
  const ComplexMatrix dt = es.vectors.adjoint() * d.mat() * es.vectors;
  ComplexMatrix lt(dt.rows(), dt.cols());
  for (Eigen::Index a = 0; a < dt.rows(); ++a) {
    for (Eigen::Index b = 0; b < dt.cols(); ++b) {
      lt(a, b) = 2.0 * dt(a, b) / (es.values(a) + es.values(b));
    }
  }
  return {HermitianMatrix(ComplexMatrix(es.vectors * lt * es.vectors.adjoint())), regularized};
}

// ---------------------------------------------------------------------------
// Trace norms

double nuclear_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

double trace_abs(const ComplexMatrix& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) fail(ErrorKind::validation, "trace_abs: matrix must be square");
  if (!all_finite(a)) fail(ErrorKind::validation, "trace_abs: non-finite entries");
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, max_abs(a));
  // Normal matrices: |eigenvalues| are the singular values.
  const ComplexMatrix commutator = a * a.adjoint() - a.adjoint() * a;
  if (max_abs(commutator) <= 1e-13 * scale * scale) return nuclear_norm(a);

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a);
  if (solver.info() != Eigen::Success) fail(ErrorKind::numerical_failure, "complex eigensolver did not converge");
  ComplexMatrix v = solver.eigenvectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const RealVector sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0 || sv(0) / smin > tol.eigenvector_condition) {
    fail(ErrorKind::ill_conditioned, "trace_abs: matrix is defective or nearly so");
  }
  return solver.eigenvalues().cwiseAbs().sum();
}

double trace_abs_congruence(const HermitianMatrix& p, const ComplexMatrix& a, const Tolerances& tol) {
  if (p.dim() != a.rows() || a.rows() != a.cols()) {
    fail(ErrorKind::validation, "trace_abs_congruence: dimension mismatch");
  }
  const HermitianMatrix root = psd_sqrt(p, tol);
  return nuclear_norm(root.mat() * a * root.mat());
}

double trace_abs_congruence(const RealMatrix& p, const RealMatrix& a, const Tolerances& tol) {
  if (p.rows() != a.rows() || a.rows() != a.cols()) {
    fail(ErrorKind::validation, "trace_abs_congruence: dimension mismatch");
  }
  const RealMatrix root = psd_sqrt(p, tol);
  return nuclear_norm((root * a * root).cast<cplx>());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace pauli {
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

// ---------------------------------------------------------------------------
// Extended space

ExtendedOperator::ExtendedOperator(Eigen::Index nblocks, Eigen::Index blockdim)
    : n_(nblocks), d_(blockdim), m_(ComplexMatrix::Zero(nblocks * blockdim, nblocks * blockdim)) {}

ExtendedOperator::ExtendedOperator(Eigen::Index nblocks, Eigen::Index blockdim, ComplexMatrix full)
    : n_(nblocks), d_(blockdim), m_(std::move(full)) {
  if (m_.rows() != n_ * d_ || m_.cols() != n_ * d_) {
    fail(ErrorKind::validation, "extended operator: matrix shape does not match n*d");
  }
}

ExtendedOperator ExtendedOperator::identity(Eigen::Index nblocks, Eigen::Index blockdim) {
  return {nblocks, blockdim, ComplexMatrix::Identity(nblocks * blockdim, nblocks * blockdim)};
}

ExtendedOperator ExtendedOperator::tensor(const RealMatrix& w, const ComplexMatrix& s) {
  if (w.rows() != w.cols() || s.rows() != s.cols()) fail(ErrorKind::validation, "tensor: factors must be square");
  return {w.rows(), s.rows(), kron(w.cast<cplx>(), s)};
}

ExtendedOperator ExtendedOperator::outer(const std::vector<HermitianMatrix>& x) {
  if (x.empty()) fail(ErrorKind::validation, "outer: empty operator column");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index d = x.front().dim();
  ExtendedOperator out(n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) out.block(j, k) = x[j].mat() * x[k].mat();
  }
  return out;
}

bool ExtendedOperator::is_hermitian(double tol) const { return max_abs(m_ - m_.adjoint()) <= tol; }

bool ExtendedOperator::is_block_symmetric(double tol) const {
  for (Eigen::Index j = 0; j < n_; ++j) {
    for (Eigen::Index k = j + 1; k < n_; ++k) {
      if (max_abs(block(j, k) - block(k, j)) > tol) return false;
    }
  }
  return true;
}

ExtendedOperator& ExtendedOperator::operator+=(const ExtendedOperator& other) {
  if (other.n_ != n_ || other.d_ != d_) fail(ErrorKind::validation, "extended operator: shape mismatch");
  m_ += other.m_;
  return *this;
}

ExtendedOperator operator-(const ExtendedOperator& a, const ExtendedOperator& b) {
  if (a.n_ != b.n_ || a.d_ != b.d_) fail(ErrorKind::validation, "extended operator: shape mismatch");
  return {a.n_, a.d_, a.m_ - b.m_};
}

ExtendedOperator operator*(double s, const ExtendedOperator& a) { return {a.n_, a.d_, s * a.m_}; }

ComplexMatrix partial_trace_h(const ExtendedOperator& a) {
  ComplexMatrix out(a.nblocks(), a.nblocks());
  for (Eigen::Index j = 0; j < a.nblocks(); ++j) {
    for (Eigen::Index k = 0; k < a.nblocks(); ++k) out(j, k) = a.block(j, k).trace();
  }
  return out;
}

ExtendedOperator partial_transpose_1(const ExtendedOperator& a) {
  ExtendedOperator out(a.nblocks(), a.blockdim());
  for (Eigen::Index j = 0; j < a.nblocks(); ++j) {
    for (Eigen::Index k = 0; k < a.nblocks(); ++k) out.block(j, k) = a.block(k, j);
  }
  return out;
}

SymSplit sym_split(const ExtendedOperator& a) {
  const ExtendedOperator t = partial_transpose_1(a);
  ExtendedOperator plus(a.nblocks(), a.blockdim(), 0.5 * (a.full() + t.full()));
  ExtendedOperator minus(a.nblocks(), a.blockdim(), 0.5 * (a.full() - t.full()));
  return {std::move(plus), std::move(minus)};
}

ExtendedOperator sym_plus(const ExtendedOperator& a) { return sym_split(a).plus; }
ExtendedOperator sym_minus(const ExtendedOperator& a) { return sym_split(a).minus; }

}  // namespace qbayes
