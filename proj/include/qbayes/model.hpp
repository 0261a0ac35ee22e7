#pragma once

// Discretized Bayesian estimation problems: a finite grid of parameter values
// with prior masses, a state per grid point and a quadratic loss weight.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbayes/matcore.hpp"

namespace qbayes {

/// Constant weight matrix, or one weight matrix per grid point.
class WeightSpec {
 public:
  WeightSpec() = default;
  static WeightSpec constant(RealMatrix w);
  static WeightSpec per_point(std::vector<RealMatrix> ws);

  bool is_constant() const noexcept { return constant_; }
  Eigen::Index dim() const;
  /// Weight matrix at grid point m (the constant one for constant specs).
  const RealMatrix& at(std::size_t m) const;
  const RealMatrix& constant_matrix() const;
  const std::vector<RealMatrix>& matrices() const noexcept { return ws_; }

 private:
  bool constant_ = true;
  std::vector<RealMatrix> ws_;
};

struct GridPoint {
  RealVector theta;
  double weight = 0.0;
  DensityMatrix state;
  std::optional<std::vector<HermitianMatrix>> derivatives;  // ∂S/∂θ_j
};

class StatisticalModel {
 public:
  StatisticalModel(std::vector<GridPoint> points, WeightSpec weight,
                   std::optional<std::vector<RealVector>> prior_score = std::nullopt);

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index d() const noexcept { return d_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<GridPoint>& points() const noexcept { return points_; }
  const GridPoint& point(std::size_t m) const { return points_.at(m); }
  const WeightSpec& weight() const noexcept { return weight_; }
  const std::optional<std::vector<RealVector>>& prior_score() const noexcept { return score_; }
  bool has_derivatives() const;

  /// Same model with every state conjugated by U (derivatives too).
  StatisticalModel conjugated(const ComplexMatrix& u) const;
  /// Same model with the grid points reordered: new point i is old point order[i].
  StatisticalModel permuted(std::span<const std::size_t> order) const;
  /// Same model with the weight replaced.
  StatisticalModel with_weight(WeightSpec weight) const;

 private:
  Eigen::Index n_ = 0;
  Eigen::Index d_ = 0;
  std::vector<GridPoint> points_;
  WeightSpec weight_;
  std::optional<std::vector<RealVector>> score_;
};

struct BayesMoments {
  DensityMatrix s_b;                // Σ π_m S_m
  std::vector<HermitianMatrix> d_b;  // Σ π_m θ_{m,j} S_m
  RealMatrix m;                     // Σ π_m θ_m θ_mᵀ
  RealVector theta_bar;
  double w_bar = 0.0;  // Σ π_m θ_mᵀ W(θ_m) θ_m
};

struct ExtendedMoments {
  ExtendedOperator s_bar;            // Σ π_m W(θ_m) (x) S_m
  std::vector<HermitianMatrix> d_bar;  // Σ π_m Σ_k W_jk(θ_m) θ_{m,k} S_m
  double w_bar = 0.0;
  std::vector<ExtendedOperator> per_point_s;  // W(θ_m) (x) S_m
  // Per-point ingredients consumed by the per-point bounds.
  std::vector<double> weights;
  std::vector<RealMatrix> weight_matrices;
  std::vector<DensityMatrix> states;
  bool constant_weight = true;
  // Plain Bayesian moments, kept for the SLD start of the Nagaoka search and the
  // constant-weight collapsed forms.
  DensityMatrix s_b;
  std::vector<HermitianMatrix> d_b;

  bool has_points() const noexcept { return !states.empty(); }
  Eigen::Index n() const noexcept { return s_bar.nblocks(); }
  Eigen::Index d() const noexcept { return s_bar.blockdim(); }
};

BayesMoments build_moments(const StatisticalModel& model);
ExtendedMoments build_extended_moments(const StatisticalModel& model);

/// Extended moments of a constant-weight problem that is only known through its
/// Bayesian moments (no per-point states). Per-point fields stay empty.
ExtendedMoments extended_from_moments(const BayesMoments& moments, const RealMatrix& w);

// ---------------------------------------------------------------------------
// Model zoo

StatisticalModel classical_binary(double a, double r);
StatisticalModel correlated_pair(double a, double r);
StatisticalModel qubit_xy(double b, int points_per_ring, int rings = 1);
StatisticalModel qubit_z_line(int grid, double half_width = 0.5);
StatisticalModel point_mass(const RealVector& theta, const DensityMatrix& state, const RealMatrix& w);

struct RandomModelOptions {
  int n = 2;
  int d = 2;
  std::uint64_t seed = 0;
  int points = 0;               // 0 selects n + 3
  bool per_point_weight = false;
};

StatisticalModel random_model(const RandomModelOptions& options);

/// Dispatches by generator name. `grid_size` is forwarded to the generators
/// that take a grid (qubit_xy, qubit_z_line, random_model point count).
StatisticalModel model_zoo(std::string_view name, std::span<const double> params, int grid_size = 0);

std::vector<std::string> zoo_names();

// ---------------------------------------------------------------------------
// Random helpers shared by tests and the verification harness

class Rng;

ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim);
DensityMatrix random_state(Rng& rng, Eigen::Index dim, double mix = 0.1);
HermitianMatrix random_hermitian(Rng& rng, Eigen::Index dim);
RealMatrix random_spd(Rng& rng, Eigen::Index dim, double floor = 0.2);

}  // namespace qbayes
