#include <cmath>

#include "qbayes/lmi.hpp"
#include "qbayes/sdpbounds.hpp"
#include "sdp_detail.hpp"

namespace qbayes {

std::string_view to_string(AppendixKind kind) noexcept {
  switch (kind) {
    case AppendixKind::f_sdp: return "f_sdp";
    case AppendixKind::f1: return "f1";
    case AppendixKind::f2: return "f2";
    case AppendixKind::f3: return "f3";
    case AppendixKind::f4: return "f4";
    case AppendixKind::f5: return "f5";
  }
  return "unknown";
}

namespace {

ExtendedOperator tensor_sum(const std::vector<TensorTerm>& terms, Eigen::Index n, Eigen::Index d) {
  ExtendedOperator s(n, d);
  for (const auto& t : terms) s += t.weight * ExtendedOperator::tensor(t.w, t.s.mat());
  return s;
}

ExtendedOperator sqrt_tensor(const TensorTerm& t) {
  return ExtendedOperator::tensor(psd_sqrt(t.w), psd_sqrt(t.s.hermitian()).mat());
}

// Tr Re Z + TrAbs Im Z with Z = Tr_H(√𝕊 𝕏 √𝕊).
double z_value(const TensorTerm& t, const ExtendedOperator& x, bool with_real_part) {
  const ExtendedOperator r = sqrt_tensor(t);
  const ComplexMatrix z = partial_trace_h(ExtendedOperator(x.nblocks(), x.blockdim(), r.full() * x.full() * r.full()));
  RealMatrix im = z.imag();
  im = 0.5 * (im - im.transpose()).eval();
  const double tabs = trace_abs(im.cast<cplx>());
  return with_real_part ? z.real().trace() + tabs : tabs;
}

double commutator_term(const TensorTerm& t, const ExtendedOperator& x) {
  const double root = detail::sqrt_psd_det(t.w);
  if (root == 0.0) return 0.0;
  const ComplexMatrix diff = ComplexMatrix(x.block(0, 1)) - ComplexMatrix(x.block(1, 0));
  return root * trace_abs_congruence(t.s.hermitian(), diff);
}

double block_symmetric_min(const ExtendedOperator* cost, const ExtendedOperator& lower, const SolverOptions& options) {
  LmiBuilder lmi;
  const std::size_t blk = lmi.add_lmi(BlockKind::complex_hermitian, lower.dim());
  lmi.add_constant_matrix(blk, lower.full(), -1.0);
  (void)detail::add_block_symmetric(lmi, blk, lower.nblocks(), lower.blockdim(), cost);
  const LmiSolution sol = lmi.solve(options);
  detail::require_optimal(sol, "block-symmetric minimization");
  return sol.value;
}

}  // namespace

double appendix_f(AppendixKind kind, const std::vector<TensorTerm>& terms, const ExtendedOperator& x,
                  const SolverOptions& options) {
  if (terms.empty()) fail(ErrorKind::validation, "no tensor terms given");
  const Eigen::Index n = x.nblocks();
  const Eigen::Index d = x.blockdim();
  if (n < 1 || d < 1) fail(ErrorKind::validation, "operator is empty");
  if (!x.is_hermitian(1e-10)) fail(ErrorKind::validation, "operator is not Hermitian");
  for (const auto& t : terms) {
    if (t.w.rows() != n || t.w.cols() != n || t.s.dim() != d) {
      fail(ErrorKind::validation, "tensor term dimensions differ from the operator");
    }
    if (!(t.weight >= 0.0)) fail(ErrorKind::validation, "tensor term weight must be non-negative");
    if ((t.w - t.w.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::validation, "weight is not symmetric");
  }
  const ExtendedOperator s = tensor_sum(terms, n, d);
  if (min_eigenvalue(HermitianMatrix(s.full())) <= 1e-10) {
    fail(ErrorKind::not_psd, "tensor operator is not strictly positive");
  }
  const bool needs_two = kind == AppendixKind::f1 || kind == AppendixKind::f4;
  if (needs_two && n != 2) fail(ErrorKind::capability, "this bound is defined for two parameters only");
  const bool single = kind == AppendixKind::f1 || kind == AppendixKind::f2;
  if (single && terms.size() != 1) fail(ErrorKind::capability, "this bound needs a single tensor term");

  const SymSplit split = sym_split(x);
  const double plus_term = (s.full() * split.plus.full()).trace().real();
  double value = 0.0;
  switch (kind) {
    case AppendixKind::f_sdp:
      value = block_symmetric_min(&s, x, options);
      break;
    case AppendixKind::f1:
      value = plus_term + commutator_term(terms.front(), x);
      break;
    case AppendixKind::f2:
      value = z_value(terms.front(), x, true);
      break;
    case AppendixKind::f3:
      value = plus_term;
      for (const auto& t : terms) {
        if (t.weight == 0.0) continue;
        const ExtendedOperator r = sqrt_tensor(t);
        const ExtendedOperator lower(n, d, r.full() * split.minus.full() * r.full());
        value += t.weight * block_symmetric_min(nullptr, lower, options);
      }
      break;
    case AppendixKind::f4:
      value = plus_term;
      for (const auto& t : terms) value += t.weight * commutator_term(t, x);
      break;
    case AppendixKind::f5:
      value = plus_term;
      for (const auto& t : terms) value += t.weight * z_value(t, x, false);
      break;
  }
  return value;
}

}  // namespace qbayes
