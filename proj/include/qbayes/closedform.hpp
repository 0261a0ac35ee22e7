#pragma once

// Closed-form Bayesian bounds: SLD (Personick / Rubio–Dunningham), RLD and the
// quantum van Tree inequality. Eigendecompositions only.

#include <string>
#include <vector>

#include "qbayes/model.hpp"

namespace qbayes {

struct SldPackage {
  std::vector<HermitianMatrix> l;  // Bayesian SLDs: ½(S_B L_j + L_j S_B) = D_B,j
  RealMatrix k;                    // K_jk = ½Tr(S_B{L_j, L_k})
  bool regularized = false;
};

struct SldBound {
  double value = 0.0;  // Tr(W(M − K))
  SldPackage package;
  std::vector<std::string> warnings;
};

struct RldPackage {
  std::vector<ComplexMatrix> ltilde;  // S_B⁻¹ D_B,j
  ComplexMatrix ktilde;               // K̃_jk = Tr(S_B L̃_k L̃_j†)
  bool regularized = false;
};

struct RldBound {
  double value = 0.0;  // Tr(W(M − Re K̃)) + TrAbs(W Im K̃)
  RldPackage package;
  std::vector<std::string> warnings;
};

struct VanTreeBound {
  double value = 0.0;   // Tr(W J_B⁻¹)
  RealMatrix information;  // J(π) + Σ π_m J^Q(θ_m)
  RealMatrix prior_information;
  std::vector<std::string> warnings;
};

SldBound sld_bound(const BayesMoments& moments, const RealMatrix& w, const Tolerances& tol = kDefaultTolerances);
RldBound rld_bound(const BayesMoments& moments, const RealMatrix& w, const Tolerances& tol = kDefaultTolerances);

/// SLD quantum Fisher information of one state with the given derivatives.
RealMatrix sld_fisher_point(const DensityMatrix& state, const std::vector<HermitianMatrix>& derivatives,
                            const Tolerances& tol = kDefaultTolerances);

/// Requires state derivatives on every grid point, prior scores and a constant weight.
VanTreeBound van_tree_bound(const StatisticalModel& model, const RealMatrix& w,
                            const Tolerances& tol = kDefaultTolerances);
VanTreeBound van_tree_bound(const StatisticalModel& model, const Tolerances& tol = kDefaultTolerances);

}  // namespace qbayes
