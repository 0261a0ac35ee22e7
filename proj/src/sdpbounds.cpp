#include "qbayes/sdpbounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qbayes/lmi.hpp"
#include "qbayes/rng.hpp"
#include "sdp_detail.hpp"

namespace qbayes {

std::vector<ComplexMatrix> hermitian_basis(Eigen::Index d) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index a = 0; a < d; ++a) {
    ComplexMatrix e = ComplexMatrix::Zero(d, d);
    e(a, a) = 1.0;
    out.push_back(e);
  }
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(a, b) = re(b, a) = 1.0;
      out.push_back(re);
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(a, b) = kI;
      im(b, a) = -kI;
      out.push_back(im);
    }
  }
  return out;
}

namespace detail {

void place(LmiBuilder& lmi, std::size_t blk, std::size_t var, Eigen::Index r0, Eigen::Index c0,
           const ComplexMatrix& b) {
  if (r0 > c0) {
    place(lmi, blk, var, c0, r0, b.adjoint());
    return;
  }
  for (Eigen::Index a = 0; a < b.rows(); ++a) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      if (r0 == c0 && c < a) continue;
      if (b(a, c) != cplx(0.0)) lmi.add_coefficient(blk, var, r0 + a, c0 + c, b(a, c));
    }
  }
}

HermitianVars add_hermitian_vars(LmiBuilder& lmi, Eigen::Index count, Eigen::Index d) {
  HermitianVars hv;
  hv.count = count;
  hv.d = d;
  hv.basis = hermitian_basis(d);
  hv.first = lmi.add_variables(static_cast<std::size_t>(count * d * d));
  return hv;
}

HermitianMatrix HermitianVars::decode(const RealVector& y, Eigen::Index j) const {
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t p = 0; p < basis.size(); ++p) out += y(static_cast<Eigen::Index>(var(j, p))) * basis[p];
  return HermitianMatrix(out);
}

BlockSymVars add_block_symmetric(LmiBuilder& lmi, std::size_t blk, Eigen::Index n, Eigen::Index d,
                                 const ExtendedOperator* cost) {
  BlockSymVars bs;
  bs.n = n;
  bs.d = d;
  bs.basis = hermitian_basis(d);
  bs.first = lmi.add_variables(static_cast<std::size_t>(n * (n + 1) / 2 * d * d));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      for (std::size_t p = 0; p < bs.basis.size(); ++p) {
        const ComplexMatrix& b = bs.basis[p];
        const std::size_t v = bs.var(j, k, p);
        place(lmi, blk, v, j * d, k * d, b);
        double c = 0.0;
        if (cost != nullptr) {
          // Tr(S 𝕃) picks up S_kj at (j,k) and S_jk at (k,j).
          c = (ComplexMatrix(cost->block(k, j)) * b).trace().real();
          if (j != k) c += (ComplexMatrix(cost->block(j, k)) * b).trace().real();
        } else if (j == k) {
          c = b.trace().real();
        }
        if (c != 0.0) lmi.add_cost(v, c);
      }
    }
  }
  return bs;
}

std::size_t BlockSymVars::var(Eigen::Index j, Eigen::Index k, std::size_t p) const {
  if (j > k) std::swap(j, k);
  // pairs (j, k≥j) in row-major order
  const Eigen::Index pair = j * n - j * (j - 1) / 2 + (k - j);
  return first + static_cast<std::size_t>(pair * d * d) + p;
}

ExtendedOperator BlockSymVars::decode(const RealVector& y) const {
  ExtendedOperator out(n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      ComplexMatrix blk = ComplexMatrix::Zero(d, d);
      for (std::size_t p = 0; p < basis.size(); ++p) blk += y(static_cast<Eigen::Index>(var(j, k, p))) * basis[p];
      out.block(j, k) = blk;
      if (j != k) out.block(k, j) = blk;
    }
  }
  return out;
}

void require_optimal(const LmiSolution& sol, std::string_view what) {
  if (sol.optimal()) return;
  std::ostringstream os;
  os << what << ": conic solver ended with status " << to_string(sol.conic.status) << " after "
     << sol.conic.iterations << " iterations (gap " << sol.conic.gap << ", primal residual "
     << sol.conic.primal_residual << ", dual residual " << sol.conic.dual_residual << ")";
  fail(ErrorKind::solver_failure, os.str());
}

double sqrt_psd_det(const RealMatrix& w) {
  const Eigen::SelfAdjointEigenSolver<RealMatrix> es(w, Eigen::EigenvaluesOnly);
  double det = 1.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) det *= std::max(0.0, es.eigenvalues()(i));
  return std::sqrt(det);
}

}  // namespace detail

namespace {

using detail::BlockSymVars;
using detail::HermitianVars;
using detail::place;
using detail::sqrt_psd_det;

void check_em(const ExtendedMoments& em) {
  const Eigen::Index n = em.n();
  const Eigen::Index d = em.d();
  if (n < 1 || d < 1) fail(ErrorKind::validation, "extended moments are empty");
  if (static_cast<Eigen::Index>(em.d_bar.size()) != n) fail(ErrorKind::validation, "first moments have wrong count");
  for (const auto& x : em.d_bar) {
    if (x.dim() != d) fail(ErrorKind::validation, "first moment has wrong dimension");
  }
  if (!em.s_bar.is_hermitian(1e-10)) fail(ErrorKind::validation, "averaged extended state is not Hermitian");
}

// −2 Re Tr(D̄_j B) on every X_j basis element.
void add_linear_cost(LmiBuilder& lmi, const HermitianVars& xs, const std::vector<HermitianMatrix>& d_bar) {
  for (Eigen::Index j = 0; j < xs.count; ++j) {
    for (std::size_t p = 0; p < xs.basis.size(); ++p) {
      const double c = -2.0 * (d_bar[static_cast<std::size_t>(j)].mat() * xs.basis[p]).trace().real();
      if (c != 0.0) lmi.add_cost(xs.var(j, p), c);
    }
  }
}

std::vector<HermitianMatrix> decode_all(const HermitianVars& xs, const RealVector& y) {
  std::vector<HermitianMatrix> out;
  for (Eigen::Index j = 0; j < xs.count; ++j) out.push_back(xs.decode(y, j));
  return out;
}

// Schur block [[V, M], [M†, I]] with row j of M equal to vec(Σ_k R_jk √S X_k).
// V is real symmetric with Tr(cost · V) in the objective.
struct SchurBlock {
  std::size_t v_first = 0;
  Eigen::Index n = 0;
};

SchurBlock add_schur_block(LmiBuilder& lmi, const HermitianVars& xs, const RealMatrix& r, const HermitianMatrix& sqrt_s,
                           const RealMatrix& cost) {
  const Eigen::Index n = xs.count;
  const Eigen::Index d = xs.d;
  const Eigen::Index d2 = d * d;
  const std::size_t blk = lmi.add_lmi(BlockKind::complex_hermitian, n + d2);
  for (Eigen::Index i = 0; i < d2; ++i) lmi.add_constant(blk, n + i, n + i, 1.0);

  SchurBlock sb;
  sb.n = n;
  sb.v_first = lmi.add_variables(static_cast<std::size_t>(n * (n + 1) / 2));
  std::size_t v = sb.v_first;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index rr = 0; rr <= c; ++rr, ++v) {
      lmi.add_coefficient(blk, v, rr, c, 1.0);
      const double cc = rr == c ? cost(rr, rr) : cost(rr, c) + cost(c, rr);
      if (cc != 0.0) lmi.add_cost(v, cc);
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (std::size_t p = 0; p < xs.basis.size(); ++p) {
      const ComplexMatrix y = sqrt_s.mat() * xs.basis[p];
      const std::size_t var = xs.var(k, p);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, k) == 0.0) continue;
        for (Eigen::Index col = 0; col < d; ++col) {
          for (Eigen::Index row = 0; row < d; ++row) {
            const cplx val = r(j, k) * y(row, col);
            if (val != cplx(0.0)) lmi.add_coefficient(blk, var, j, n + col * d + row, val);
          }
        }
      }
    }
  }
  return sb;
}

RealMatrix decode_v(const SchurBlock& sb, const RealVector& y) {
  RealMatrix v(sb.n, sb.n);
  std::size_t i = sb.v_first;
  for (Eigen::Index c = 0; c < sb.n; ++c) {
    for (Eigen::Index r = 0; r <= c; ++r, ++i) v(r, c) = v(c, r) = y(static_cast<Eigen::Index>(i));
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

NhSolution nagaoka_hayashi_bound(const ExtendedMoments& em, const SolverOptions& options) {
  check_em(em);
  const Eigen::Index n = em.n();
  const Eigen::Index d = em.d();
  LmiBuilder lmi;
  const std::size_t blk = lmi.add_lmi(BlockKind::complex_hermitian, n * d + d);
  for (Eigen::Index i = 0; i < d; ++i) lmi.add_constant(blk, n * d + i, n * d + i, 1.0);
  const BlockSymVars ls = detail::add_block_symmetric(lmi, blk, n, d, &em.s_bar);
  const HermitianVars xs = detail::add_hermitian_vars(lmi, n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < xs.basis.size(); ++p) place(lmi, blk, xs.var(j, p), j * d, n * d, xs.basis[p]);
  }
  add_linear_cost(lmi, xs, em.d_bar);
  lmi.add_offset(em.w_bar);

  const LmiSolution sol = lmi.solve(options);
  detail::require_optimal(sol, "Nagaoka-Hayashi bound");
  NhSolution out;
  out.value = sol.value;
  out.lopt = ls.decode(sol.y);
  out.xopt = decode_all(xs, sol.y);
  out.diagnostics = sol.conic;
  return out;
}

HolevoSolution holevo_type_bound(const ExtendedMoments& em, HolevoForm form, const SolverOptions& options) {
  check_em(em);
  const Eigen::Index n = em.n();
  const Eigen::Index d = em.d();
  if (form == HolevoForm::automatic) form = em.constant_weight ? HolevoForm::collapsed : HolevoForm::per_point;
  if (form == HolevoForm::collapsed && !em.constant_weight) {
    fail(ErrorKind::unsupported_configuration, "collapsed Holevo-type form requires a constant weight matrix");
  }
  if (form == HolevoForm::per_point && !em.has_points()) {
    fail(ErrorKind::capability, "per-point Holevo-type form needs per-point states (moments only were given)");
  }
  if (form == HolevoForm::collapsed && em.weight_matrices.empty()) {
    fail(ErrorKind::validation, "extended moments carry no weight matrix");
  }

  LmiBuilder lmi;
  const HermitianVars xs = detail::add_hermitian_vars(lmi, n, d);
  std::vector<SchurBlock> blocks;
  if (form == HolevoForm::collapsed) {
    const RealMatrix eye = RealMatrix::Identity(n, n);
    blocks.push_back(add_schur_block(lmi, xs, eye, psd_sqrt(em.s_b.hermitian()), em.weight_matrices.front()));
  } else {
    for (std::size_t m = 0; m < em.states.size(); ++m) {
      const RealMatrix& w = em.weight_matrices[m];
      if (min_eigenvalue(w) <= 1e-10) {
        fail(ErrorKind::unsupported_configuration,
             "per-point Holevo-type form needs a strictly positive weight matrix at every grid point");
      }
      if (em.weights[m] <= 0.0) continue;
      const RealMatrix cost = em.weights[m] * RealMatrix::Identity(n, n);
      blocks.push_back(add_schur_block(lmi, xs, psd_sqrt(w), psd_sqrt(em.states[m].hermitian()), cost));
    }
  }
  add_linear_cost(lmi, xs, em.d_bar);
  lmi.add_offset(em.w_bar);

  const LmiSolution sol = lmi.solve(options);
  detail::require_optimal(sol, "Holevo-type bound");
  HolevoSolution out;
  out.value = sol.value;
  out.form = form;
  out.xopt = decode_all(xs, sol.y);
  for (const auto& sb : blocks) out.v_blocks.push_back(decode_v(sb, sol.y));
  out.diagnostics = sol.conic;
  return out;
}

// ---------------------------------------------------------------------------

double nagaoka_objective(const ExtendedMoments& em, const std::vector<HermitianMatrix>& x) {
  check_em(em);
  if (em.n() != 2) fail(ErrorKind::capability, "Nagaoka bound requires n=2");
  if (x.size() != 2) fail(ErrorKind::validation, "Nagaoka objective takes exactly two operators");
  for (const auto& xi : x) {
    if (xi.dim() != em.d()) fail(ErrorKind::validation, "operator dimension differs from the model");
  }
  const ExtendedOperator sp = sym_plus(ExtendedOperator::outer(x));
  double value = (em.s_bar.full() * sp.full()).trace().real();

  const ComplexMatrix comm = x[0].mat() * x[1].mat() - x[1].mat() * x[0].mat();
  if (em.has_points()) {
    for (std::size_t m = 0; m < em.states.size(); ++m) {
      if (em.weights[m] <= 0.0) continue;
      const double root = sqrt_psd_det(em.weight_matrices[m]);
      if (root == 0.0) continue;
      value += em.weights[m] * root * trace_abs_congruence(em.states[m].hermitian(), comm);
    }
  } else {
    const double root = sqrt_psd_det(em.weight_matrices.front());
    if (root != 0.0) value += root * trace_abs_congruence(em.s_b.hermitian(), comm);
  }
  for (std::size_t j = 0; j < 2; ++j) value -= 2.0 * (em.d_bar[j].mat() * x[j].mat()).trace().real();
  return value + em.w_bar;
}

NagaokaSearchResult nagaoka_bound_search(const ExtendedMoments& em, int restarts, std::uint64_t seed) {
  check_em(em);
  if (em.n() != 2) fail(ErrorKind::capability, "Nagaoka bound requires n=2");
  if (restarts < 0) fail(ErrorKind::validation, "restart count must be non-negative");
  const Eigen::Index d = em.d();
  const std::vector<ComplexMatrix> basis = hermitian_basis(d);
  const auto dim = static_cast<Eigen::Index>(basis.size());

  auto to_ops = [&](const RealVector& c) {
    std::vector<HermitianMatrix> ops;
    for (Eigen::Index j = 0; j < 2; ++j) {
      ComplexMatrix acc = ComplexMatrix::Zero(d, d);
      for (Eigen::Index p = 0; p < dim; ++p) acc += c(j * dim + p) * basis[static_cast<std::size_t>(p)];
      ops.emplace_back(acc);
    }
    return ops;
  };
  // Coordinates in the basis: diagonal entries, then Re and Im of the upper triangle.
  auto to_coords = [&](const std::vector<HermitianMatrix>& ops) {
    RealVector c(2 * dim);
    for (Eigen::Index j = 0; j < 2; ++j) {
      const ComplexMatrix& a = ops[static_cast<std::size_t>(j)].mat();
      Eigen::Index p = 0;
      for (Eigen::Index i = 0; i < d; ++i) c(j * dim + p++) = a(i, i).real();
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index s = r + 1; s < d; ++s) {
          c(j * dim + p++) = a(r, s).real();
          c(j * dim + p++) = -a(r, s).imag();
        }
      }
    }
    return c;
  };

  NagaokaSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto f = [&](const RealVector& c) {
    ++best.evaluations;
    return nagaoka_objective(em, to_ops(c));
  };

  const auto [state, regularized] = regularize(em.s_b);
  (void)regularized;
  std::vector<HermitianMatrix> sld;
  for (const auto& db : em.d_b) sld.push_back(lyapunov_solve(state, db).solution);
  const RealVector start = to_coords(sld);
  const double scale = std::max(1.0, start.cwiseAbs().maxCoeff());

  Rng rng(seed);
  constexpr long kEvalCap = 40000;
  for (int r = 0; r <= restarts; ++r) {
    RealVector c = start;
    if (r > 0) {
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) += 0.5 * scale * rng.normal();
    }
    double fc = f(c);
    double h = 0.25 * scale;
    const long budget = best.evaluations + kEvalCap;
    while (h > 1e-10 && best.evaluations < budget) {
      bool improved = false;
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        for (double sgn : {1.0, -1.0}) {
          RealVector trial = c;
          trial(i) += sgn * h;
          const double ft = f(trial);
          if (ft < fc - 1e-15) {
            c = std::move(trial);
            fc = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    if (fc < best.value) {
      best.value = fc;
      best.x = to_ops(c);
    }
  }
  return best;
}

}  // namespace qbayes
