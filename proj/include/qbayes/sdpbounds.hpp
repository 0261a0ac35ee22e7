#pragma once

// Bayesian Nagaoka–Hayashi, Holevo-type and two-parameter Nagaoka bounds, plus
// the family of operator-inequality minimizations (f, f1 … f5) they are built on.

#include <cstdint>
#include <vector>

#include "qbayes/conic.hpp"
#include "qbayes/model.hpp"

namespace qbayes {

struct NhSolution {
  double value = 0.0;
  ExtendedOperator lopt;             // block-symmetric, Hermitian blocks
  std::vector<HermitianMatrix> xopt;
  ConicSolution diagnostics;
};

/// min Tr(S̄𝕃) − 2Σ_j Tr(D̄_j X_j) + w̄  subject to  [[𝕃, X], [X†, I]] ⪰ 0.
NhSolution nagaoka_hayashi_bound(const ExtendedMoments& em, const SolverOptions& options = {});

enum class HolevoForm {
  automatic,  // collapsed for constant weights, per-point otherwise
  per_point,  // one V per grid point, trace-abs inside the prior average
  collapsed,  // single V against Z_B (constant weight only)
};

struct HolevoSolution {
  double value = 0.0;
  std::vector<HermitianMatrix> xopt;
  std::vector<RealMatrix> v_blocks;  // one per grid point, or a single one when collapsed
  HolevoForm form = HolevoForm::collapsed;
  ConicSolution diagnostics;
};

HolevoSolution holevo_type_bound(const ExtendedMoments& em, HolevoForm form = HolevoForm::automatic,
                                 const SolverOptions& options = {});

/// Two-parameter Nagaoka objective at a given X = (X_1, X_2).
double nagaoka_objective(const ExtendedMoments& em, const std::vector<HermitianMatrix>& x);

struct NagaokaSearchResult {
  double value = 0.0;  // best objective found; an upper bound on the minimum, not a certified bound
  std::vector<HermitianMatrix> x;
  long evaluations = 0;
};

/// Coordinatewise descent over a Hermitian basis, started from the Bayesian
/// SLDs and from `restarts` seeded perturbations of them.
NagaokaSearchResult nagaoka_bound_search(const ExtendedMoments& em, int restarts = 4, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Operator-inequality minimizations over 𝕊 = Σ_j π_j W_j ⊗ S_j

enum class AppendixKind { f_sdp, f1, f2, f3, f4, f5 };

struct TensorTerm {
  double weight = 1.0;
  RealMatrix w;
  DensityMatrix s;
};

/// f_sdp: min{Tr(𝕊𝕃) | 𝕃 block-symmetric Hermitian, 𝕃 ⪰ 𝕏}; f1 … f5 are the
/// closed-form and per-term lower bounds on it.
double appendix_f(AppendixKind kind, const std::vector<TensorTerm>& terms, const ExtendedOperator& x,
                  const SolverOptions& options = {});

std::string_view to_string(AppendixKind kind) noexcept;

/// Hermitian basis of d×d matrices: E_aa, then E_ab + E_ba and i(E_ab − E_ba) for a < b.
std::vector<ComplexMatrix> hermitian_basis(Eigen::Index d);

}  // namespace qbayes
