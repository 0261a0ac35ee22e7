#include "qbayes/lmi.hpp"

namespace qbayes {

std::size_t LmiBuilder::add_variables(std::size_t count) {
  const std::size_t first = coeffs_.size();
  coeffs_.resize(first + count);
  cost_.resize(first + count, 0.0);
  return first;
}

std::size_t LmiBuilder::add_lmi(BlockKind kind, Eigen::Index dim) {
  if (dim < 1) fail(ErrorKind::validation, "LMI block dimension must be positive");
  blocks_.push_back({kind, dim});
  return blocks_.size() - 1;
}

void LmiBuilder::add_constant(std::size_t lmi, Eigen::Index row, Eigen::Index col, cplx value) {
  constant_.add(lmi, row, col, value);
}

void LmiBuilder::add_constant_matrix(std::size_t lmi, const ComplexMatrix& f0, double scale) {
  constant_.add_matrix(lmi, f0, scale);
}

void LmiBuilder::add_coefficient(std::size_t lmi, std::size_t var, Eigen::Index row, Eigen::Index col, cplx value) {
  coeffs_.at(var).add(lmi, row, col, value);
}

void LmiBuilder::add_coefficient_matrix(std::size_t lmi, std::size_t var, const ComplexMatrix& fi, double scale) {
  coeffs_.at(var).add_matrix(lmi, fi, scale);
}

void LmiBuilder::add_cost(std::size_t var, double c) { cost_.at(var) += c; }

void LmiBuilder::add_equality(std::vector<std::pair<std::size_t, double>> terms, double rhs) {
  for (const auto& [v, coeff] : terms) {
    if (v >= coeffs_.size()) fail(ErrorKind::validation, "equality references an undeclared variable");
    (void)coeff;
  }
  equalities_.emplace_back(std::move(terms), rhs);
}

// Dual of the LMI: min ⟨F0, Z⟩ − eᵀw  s.t.  ⟨F_i, Z⟩ + (Eᵀw)_i = c_i,  Z ⪰ 0.
ConicProgram LmiBuilder::program() const {
  ConicProgram prog;
  for (const auto& spec : blocks_) prog.add_block(spec.kind, spec.dim);
  const std::size_t w0 = prog.add_free_vars(equalities_.size());
  prog.objective() = constant_;
  for (std::size_t e = 0; e < equalities_.size(); ++e) prog.objective().add_free(w0 + e, -equalities_[e].second);
  std::vector<LinearFunctional> rows = coeffs_;
  for (std::size_t e = 0; e < equalities_.size(); ++e) {
    for (const auto& [v, coeff] : equalities_[e].first) rows[v].add_free(w0 + e, coeff);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) prog.add_constraint(std::move(rows[i]), cost_[i]);
  return prog;
}

LmiSolution LmiBuilder::solve(const SolverOptions& options) const {
  LmiSolution out;
  out.conic = qbayes::solve(program(), options);
  out.y = -out.conic.multipliers;
  double value = offset_;
  for (std::size_t i = 0; i < cost_.size(); ++i) value += cost_[i] * out.y(static_cast<Eigen::Index>(i));
  out.value = value;
  out.lower_bound = offset_ - out.conic.primal_value;
  out.slacks = out.conic.dual_slacks;
  return out;
}

// ---------------------------------------------------------------------------

HolevoLemmaSdp holevo_lemma_sdp(const RealMatrix& w, const RealMatrix& a, const RealMatrix& b,
                                const SolverOptions& options) {
  // Shape and sign checks are shared with the closed form.
  (void)holevo_lemma_value(w, a, b);
  const Eigen::Index n = w.rows();
  LmiBuilder lmi;
  const std::size_t blk = lmi.add_lmi(BlockKind::complex_hermitian, n);
  lmi.add_constant_matrix(blk, ComplexMatrix(a.cast<cplx>() + kI * b.cast<cplx>()), -1.0);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> index;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r <= c; ++r) {
      const std::size_t v = lmi.add_variables(1);
      index.emplace_back(r, c);
      lmi.add_coefficient(blk, v, r, c, 1.0);
      lmi.add_cost(v, r == c ? w(r, r) : w(r, c) + w(c, r));
    }
  }
  HolevoLemmaSdp out;
  const LmiSolution sol = lmi.solve(options);
  out.value = sol.value;
  out.v = RealMatrix::Zero(n, n);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto [r, c] = index[i];
    out.v(r, c) = sol.y(static_cast<Eigen::Index>(i));
    out.v(c, r) = sol.y(static_cast<Eigen::Index>(i));
  }
  out.solution = sol.conic;
  return out;
}

}  // namespace qbayes
