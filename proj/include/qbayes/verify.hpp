#pragma once

// Achievability side: explicit measurements and estimators whose Bayes risk
// upper-bounds the optimum, used to certify the lower bounds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbayes/closedform.hpp"
#include "qbayes/conic.hpp"
#include "qbayes/model.hpp"

namespace qbayes {

struct Povm {
  std::vector<HermitianMatrix> elements;

  std::size_t size() const noexcept { return elements.size(); }
  Eigen::Index dim() const { return elements.empty() ? 0 : elements.front().dim(); }
  /// Throws a validation error unless every element is ⪰ −1e-10 and they sum to I within 1e-9.
  void validate() const;
  /// Single-outcome POVM {I}.
  static Povm trivial(Eigen::Index d);
};

struct DecisionRisk {
  Povm povm;
  std::vector<RealVector> estimates;  // one per outcome
  double risk = 0.0;
};

/// Σ_m π_m Σ_x Tr(S_m Π_x) (θ̂_x − θ_m)ᵀ W(θ_m) (θ̂_x − θ_m).
double grid_risk(const StatisticalModel& model, const Povm& povm, const std::vector<RealVector>& estimates);

/// Posterior-mean estimates for a fixed POVM (constant W only).
DecisionRisk posterior_mean_estimator(const StatisticalModel& model, const Povm& povm);

/// Risk-minimizing POVM with one outcome per estimate, at fixed estimates.
Povm optimal_povm_step(const StatisticalModel& model, const std::vector<RealVector>& estimates,
                       const SolverOptions& options = {});

struct SeesawResult {
  DecisionRisk best;
  std::vector<double> history;  // accepted risks, non-increasing
  int iterations = 0;
};

/// Alternates posterior means and POVM steps from a seeded Haar-random start.
/// `outcome_count` 0 selects n + 2.
SeesawResult seesaw(const StatisticalModel& model, int outcome_count, int iters, std::uint64_t seed,
                    const SolverOptions& options = {});

/// Spectral projectors of the one-parameter Bayesian SLD with its eigenvalues as
/// estimates. `risk` is evaluated from the moments with scalar weight `w`.
DecisionRisk personick_optimal_measurement(const BayesMoments& moments, double w = 1.0);

struct AuditRecord {
  std::optional<double> sld, rld, holevo, nh, seesaw;  // seesaw: best over seeds
  std::vector<double> seesaw_runs;                       // one risk per seed
  // seesaw − nh, nh − holevo, holevo − sld, holevo − rld; missing when an input is missing
  std::optional<double> margin_seesaw_nh, margin_nh_holevo, margin_holevo_sld, margin_holevo_rld;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  /// True when every available margin is ≥ −slack and no component failed.
  bool passed(double slack = 1e-6) const;
  double min_margin() const;
};

struct AuditOptions {
  int seesaw_iters = 50;
  std::vector<std::uint64_t> seeds{1};
  int outcome_count = 0;
  SolverOptions solver;
};

/// Computes C_SLD, C_RLD, C_H, C_NH and the best seesaw risk and their ordering margins.
AuditRecord ordering_audit(const StatisticalModel& model, const AuditOptions& options = {});

struct LemmaCheck {
  std::string name;
  int passed = 0;
  int failed = 0;
  double worst = 0.0;  // largest violation (or deviation) seen
};

/// Random-instance property checks of the f-family and of the Holevo lemma.
std::vector<LemmaCheck> lemma_suite(std::uint64_t seed, int trials, const SolverOptions& options = {});

}  // namespace qbayes
