#pragma once

// Small dense semidefinite programs.
//
// Standard form handled by `solve`:
//
//   minimize    Σ_b ⟨C_b, X_b⟩ + fᵀu + offset
//   subject to  Σ_b ⟨A_ib, X_b⟩ + B_i u = b_i      for every constraint i
//               X_b ⪰ 0
//
// Each X_b is a real symmetric or complex Hermitian block, u are free reals
// and ⟨C, X⟩ = Re Tr(C X). Complex blocks are realified internally; values are
// reported in the complex picture.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qbayes/matcore.hpp"

namespace qbayes {

enum class BlockKind { real_symmetric, complex_hermitian };

struct BlockSpec {
  BlockKind kind = BlockKind::real_symmetric;
  Eigen::Index dim = 0;
};

/// One coefficient of a Hermitian matrix: `value` at (row, col), conj(value) at (col, row).
struct BlockEntry {
  std::size_t block = 0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  cplx value;
};

class LinearFunctional {
 public:
  /// Adds value at (row, col) of block `block` (and its conjugate mirror).
  void add(std::size_t block, Eigen::Index row, Eigen::Index col, cplx value);
  /// Adds every nonzero upper-triangle entry of a Hermitian coefficient matrix.
  void add_matrix(std::size_t block, const ComplexMatrix& c, double scale = 1.0);
  void add_free(std::size_t var, double coeff);

  const std::vector<BlockEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::pair<std::size_t, double>>& free_terms() const noexcept { return free_; }
  bool empty() const noexcept { return entries_.empty() && free_.empty(); }

 private:
  std::vector<BlockEntry> entries_;
  std::vector<std::pair<std::size_t, double>> free_;
};

struct LinearConstraint {
  LinearFunctional lhs;
  double rhs = 0.0;
};

class ConicProgram {
 public:
  std::size_t add_block(BlockKind kind, Eigen::Index dim);
  /// Declares `count` free scalars and returns the index of the first.
  std::size_t add_free_vars(std::size_t count);
  LinearFunctional& objective() noexcept { return objective_; }
  const LinearFunctional& objective() const noexcept { return objective_; }
  void set_offset(double offset) noexcept { offset_ = offset; }
  double offset() const noexcept { return offset_; }
  std::size_t add_constraint(LinearFunctional lhs, double rhs);

  const std::vector<BlockSpec>& blocks() const noexcept { return blocks_; }
  std::size_t free_count() const noexcept { return free_count_; }
  const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }

  /// Throws a validation error if an entry references an undeclared block,
  /// index or free variable, or carries an imaginary part where none is allowed.
  void validate() const;

  /// Plain-text dump for cross-checking with external solvers:
  ///   blocks N, then "block <i> real|complex <dim>" lines
  ///   free <count>
  ///   offset <value>
  ///   objective <k> followed by k lines "<block> <row> <col> <re> <im>" or "free <u> <coeff>"
  ///   constraints <m>, then per constraint "constraint <i> rhs <b> terms <k>" and k term lines
  std::string dump() const;

 private:
  std::vector<BlockSpec> blocks_;
  std::size_t free_count_ = 0;
  LinearFunctional objective_;
  double offset_ = 0.0;
  std::vector<LinearConstraint> constraints_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string_view to_string(SolveStatus status) noexcept;

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double primal_value = 0.0;  // objective at the primal iterate (offset included)
  double dual_value = 0.0;    // dual objective (offset included)
  double gap = 0.0;           // |primal_value − dual_value|
  double primal_residual = 0.0;  // ‖A(X) + Bu − b‖ / max(1, ‖b‖)
  double dual_residual = 0.0;
  std::vector<ComplexMatrix> blocks;       // X_b
  RealVector free_values;                  // u
  RealVector multipliers;                  // y, one per constraint
  std::vector<ComplexMatrix> dual_slacks;  // C_b − Σ_i y_i A_ib
  int iterations = 0;

  bool optimal() const noexcept { return status == SolveStatus::optimal; }
  double relative_gap() const noexcept { return gap / std::max(1.0, std::abs(primal_value)); }
};

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  /// Mehrotra predictor-corrector. When false a single centered Newton step
  /// with fixed centering `sigma` is taken per iteration.
  bool predictor_corrector = true;
  double sigma = 0.25;
  bool verbose = false;  // per-iteration trace on stderr
};

ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

/// T(H) = [[Re H, −Im H], [Im H, Re H]].
RealMatrix realify(const ComplexMatrix& h);

/// Tr(WA) + TrAbs(WB) for W ≻ 0, A symmetric and B antisymmetric.
double holevo_lemma_value(const RealMatrix& w, const RealMatrix& a, const RealMatrix& b);

struct HolevoLemmaSdp {
  double value = 0.0;
  RealMatrix v;
  ConicSolution solution;
};

/// min{Tr(WV) | V real symmetric, V ⪰ A + iB}.
HolevoLemmaSdp holevo_lemma_sdp(const RealMatrix& w, const RealMatrix& a, const RealMatrix& b,
                                const SolverOptions& options = {});

}  // namespace qbayes
