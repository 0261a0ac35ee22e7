#pragma once

// Linear matrix inequality front end:
//
//   minimize    cᵀy + offset
//   subject to  F_0^(b) + Σ_i y_i F_i^(b) ⪰ 0   for every LMI block b
//               E y = e
//
// The program is handed to `solve` through its conic dual, so F(y) comes back
// as the dual slack and the LMI optimum as minus the dual objective.

#include <cstddef>
#include <utility>
#include <vector>

#include "qbayes/conic.hpp"

namespace qbayes {

struct LmiSolution {
  double value = 0.0;        // cᵀy + offset at the returned y
  double lower_bound = 0.0;  // certified by the conic dual iterate
  RealVector y;
  std::vector<ComplexMatrix> slacks;  // F(y) per block
  ConicSolution conic;

  bool optimal() const noexcept { return conic.optimal(); }
};

class LmiBuilder {
 public:
  std::size_t add_variables(std::size_t count);
  std::size_t add_lmi(BlockKind kind, Eigen::Index dim);

  void add_constant(std::size_t lmi, Eigen::Index row, Eigen::Index col, cplx value);
  void add_constant_matrix(std::size_t lmi, const ComplexMatrix& f0, double scale = 1.0);
  void add_coefficient(std::size_t lmi, std::size_t var, Eigen::Index row, Eigen::Index col, cplx value);
  void add_coefficient_matrix(std::size_t lmi, std::size_t var, const ComplexMatrix& fi, double scale = 1.0);

  void add_cost(std::size_t var, double c);
  void add_offset(double c) noexcept { offset_ += c; }
  void add_equality(std::vector<std::pair<std::size_t, double>> terms, double rhs);

  std::size_t variable_count() const noexcept { return coeffs_.size(); }
  std::size_t lmi_count() const noexcept { return blocks_.size(); }

  ConicProgram program() const;
  LmiSolution solve(const SolverOptions& options = {}) const;

 private:
  std::vector<BlockSpec> blocks_;
  LinearFunctional constant_;
  std::vector<LinearFunctional> coeffs_;
  std::vector<double> cost_;
  double offset_ = 0.0;
  std::vector<std::pair<std::vector<std::pair<std::size_t, double>>, double>> equalities_;
};

}  // namespace qbayes
