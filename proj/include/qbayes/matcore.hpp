#pragma once

// Dense complex linear algebra shared by every bound: Hermitian spectral
// calculus, Lyapunov (SLD) solves, trace norms and block operators on the
// extended space C^n (x) H.

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "qbayes/error.hpp"

namespace qbayes {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Thresholds used by the kernel. Every operation takes them by const reference
/// with these defaults, so callers can override any of them per call.
struct Tolerances {
  double hermitian = 1e-12;          // allowed ‖A − A†‖_max after symmetrization
  double psd_clamp = 1e-10;          // eigenvalues in [−psd_clamp, 0) are clamped to zero
  double strictly_positive = 1e-10;  // min eigenvalue below this triggers regularization
  double regularization = 1e-10;     // ε in (1 − ε)S + ε I/d
  double trace = 1e-12;              // |Tr ρ − 1| for density matrices
  double density_eigenvalue = 1e-12;  // density matrices: λ_min ≥ −density_eigenvalue
  double eigenvector_condition = 1e8;
};

inline const Tolerances kDefaultTolerances{};

/// Square complex matrix with A = A†. Construction symmetrizes the input.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& a);
  explicit HermitianMatrix(const RealMatrix& a) : HermitianMatrix(ComplexMatrix(a.cast<cplx>())) {}

  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& mat() const noexcept { return m_; }
  operator const ComplexMatrix&() const noexcept { return m_; }  // NOLINT: value-like view

  double trace() const { return m_.trace().real(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

 private:
  ComplexMatrix m_;
};

/// Hermitian, positive semidefinite (within psd tolerance) and unit trace.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const ComplexMatrix& rho, const Tolerances& tol = kDefaultTolerances);
  explicit DensityMatrix(const HermitianMatrix& rho, const Tolerances& tol = kDefaultTolerances);

  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return h_.dim(); }
  const ComplexMatrix& mat() const noexcept { return h_.mat(); }
  const HermitianMatrix& hermitian() const noexcept { return h_; }
  operator const ComplexMatrix&() const noexcept { return h_.mat(); }  // NOLINT

 private:
  HermitianMatrix h_;
};

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // unitary, columns are eigenvectors
};

EigenSystem hermitian_eig(const HermitianMatrix& a);
RealVector hermitian_eigenvalues(const HermitianMatrix& a);
double min_eigenvalue(const HermitianMatrix& a);
double min_eigenvalue(const RealMatrix& symmetric);

/// U f(Λ) U† for a real function of the spectrum.
template <typename F>
HermitianMatrix spectral_apply(const HermitianMatrix& a, F&& f) {
  const EigenSystem es = hermitian_eig(a);
  RealVector mapped(es.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(es.values(i));
  return HermitianMatrix(ComplexMatrix(es.vectors * mapped.cast<cplx>().asDiagonal() * es.vectors.adjoint()));
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, const Tolerances& tol = kDefaultTolerances);
RealMatrix psd_sqrt(const RealMatrix& symmetric, const Tolerances& tol = kDefaultTolerances);
HermitianMatrix hermitian_inverse(const HermitianMatrix& a);

/// Result of bringing a state into the strictly positive cone.
struct RegularizedState {
  DensityMatrix state;
  bool regularized = false;
};

RegularizedState regularize(const DensityMatrix& s, const Tolerances& tol = kDefaultTolerances);

struct LyapunovSolution {
  HermitianMatrix solution;
  bool regularized = false;
};

/// Solves ½(S L + L S) = D for Hermitian L in the eigenbasis of S.
LyapunovSolution lyapunov_solve(const DensityMatrix& s, const HermitianMatrix& d,
                                const Tolerances& tol = kDefaultTolerances);

/// Σ|λ_i(A)| for a diagonalizable square matrix.
double trace_abs(const ComplexMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// TrAbs(P A) for P ⪰ 0 and A Hermitian or anti-Hermitian, computed as the
/// nuclear norm of √P A √P.
double trace_abs_congruence(const HermitianMatrix& p, const ComplexMatrix& a,
                            const Tolerances& tol = kDefaultTolerances);
double trace_abs_congruence(const RealMatrix& p, const RealMatrix& a,
                            const Tolerances& tol = kDefaultTolerances);

double nuclear_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// Operator on C^n (x) H viewed as an n x n grid of d x d blocks.
class ExtendedOperator {
 public:
  ExtendedOperator() = default;
  ExtendedOperator(Eigen::Index nblocks, Eigen::Index blockdim);
  ExtendedOperator(Eigen::Index nblocks, Eigen::Index blockdim, ComplexMatrix full);

  static ExtendedOperator identity(Eigen::Index nblocks, Eigen::Index blockdim);
  /// W (x) S with W real n x n.
  static ExtendedOperator tensor(const RealMatrix& w, const ComplexMatrix& s);
  /// Block outer product X Xᵀ of a column of operators: blocks X_j X_k.
  static ExtendedOperator outer(const std::vector<HermitianMatrix>& x);

  Eigen::Index nblocks() const noexcept { return n_; }
  Eigen::Index blockdim() const noexcept { return d_; }
  Eigen::Index dim() const noexcept { return n_ * d_; }

  auto block(Eigen::Index j, Eigen::Index k) { return m_.block(j * d_, k * d_, d_, d_); }
  auto block(Eigen::Index j, Eigen::Index k) const { return m_.block(j * d_, k * d_, d_, d_); }

  const ComplexMatrix& full() const noexcept { return m_; }
  ComplexMatrix& full() noexcept { return m_; }

  bool is_hermitian(double tol = 1e-12) const;
  bool is_block_symmetric(double tol = 1e-12) const;

  ExtendedOperator& operator+=(const ExtendedOperator& other);
  friend ExtendedOperator operator+(ExtendedOperator a, const ExtendedOperator& b) { return a += b; }
  friend ExtendedOperator operator-(const ExtendedOperator& a, const ExtendedOperator& b);
  friend ExtendedOperator operator*(double s, const ExtendedOperator& a);

 private:
  Eigen::Index n_ = 0;
  Eigen::Index d_ = 0;
  ComplexMatrix m_;
};

/// [Tr_H A]_{jk} = Tr A_{jk}.
ComplexMatrix partial_trace_h(const ExtendedOperator& a);

/// Block transpose over the parameter index: A_{jk} -> A_{kj}.
ExtendedOperator partial_transpose_1(const ExtendedOperator& a);

struct SymSplit {
  ExtendedOperator plus;   // ½(A + A^{T1})
  ExtendedOperator minus;  // ½(A − A^{T1})
};

SymSplit sym_split(const ExtendedOperator& a);
ExtendedOperator sym_plus(const ExtendedOperator& a);
ExtendedOperator sym_minus(const ExtendedOperator& a);

}  // namespace qbayes
