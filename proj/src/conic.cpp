#include "qbayes/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace qbayes {

// ---------------------------------------------------------------------------
// Program assembly

void LinearFunctional::add(std::size_t block, Eigen::Index row, Eigen::Index col, cplx value) {
  if (value == cplx(0.0, 0.0)) return;
  if (row > col) {
    std::swap(row, col);
    value = std::conj(value);
  }
  entries_.push_back({block, row, col, value});
}

void LinearFunctional::add_matrix(std::size_t block, const ComplexMatrix& c, double scale) {
  for (Eigen::Index col = 0; col < c.cols(); ++col) {
    for (Eigen::Index row = 0; row <= col; ++row) {
      cplx v = scale * (row == col ? cplx(c(row, row).real(), 0.0) : 0.5 * (c(row, col) + std::conj(c(col, row))));
      add(block, row, col, v);
    }
  }
}

void LinearFunctional::add_free(std::size_t var, double coeff) {
  if (coeff != 0.0) free_.emplace_back(var, coeff);
}

std::size_t ConicProgram::add_block(BlockKind kind, Eigen::Index dim) {
  if (dim < 1) fail(ErrorKind::validation, "conic block dimension must be positive");
  blocks_.push_back({kind, dim});
  return blocks_.size() - 1;
}

std::size_t ConicProgram::add_free_vars(std::size_t count) {
  const std::size_t first = free_count_;
  free_count_ += count;
  return first;
}

std::size_t ConicProgram::add_constraint(LinearFunctional lhs, double rhs) {
  constraints_.push_back({std::move(lhs), rhs});
  return constraints_.size() - 1;
}

void ConicProgram::validate() const {
  auto check = [&](const LinearFunctional& f, const std::string& where) {
    for (const auto& e : f.entries()) {
      if (e.block >= blocks_.size()) fail(ErrorKind::validation, where + ": undeclared block");
      const BlockSpec& spec = blocks_[e.block];
      if (e.row < 0 || e.col >= spec.dim) fail(ErrorKind::validation, where + ": entry outside its block");
      if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
        fail(ErrorKind::validation, where + ": non-finite coefficient");
      }
      if (e.value.imag() != 0.0 && (spec.kind == BlockKind::real_symmetric || e.row == e.col)) {
        fail(ErrorKind::validation, where + ": imaginary coefficient on a real entry");
      }
    }
    for (const auto& [u, coeff] : f.free_terms()) {
      if (u >= free_count_) fail(ErrorKind::validation, where + ": undeclared free variable");
      if (!std::isfinite(coeff)) fail(ErrorKind::validation, where + ": non-finite coefficient");
    }
  };
  if (blocks_.empty()) fail(ErrorKind::validation, "conic program has no PSD blocks");
  check(objective_, "objective");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    check(constraints_[i].lhs, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints_[i].rhs)) fail(ErrorKind::validation, "non-finite constraint right-hand side");
  }
}

namespace {

void dump_functional(std::ostream& os, const LinearFunctional& f) {
  for (const auto& e : f.entries()) {
    os << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
  }
  for (const auto& [u, coeff] : f.free_terms()) os << "free " << u << ' ' << coeff << '\n';
}

}  // namespace

std::string ConicProgram::dump() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "blocks " << blocks_.size() << '\n';
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    os << "block " << b << ' ' << (blocks_[b].kind == BlockKind::real_symmetric ? "real" : "complex") << ' '
       << blocks_[b].dim << '\n';
  }
  os << "free " << free_count_ << '\n';
  os << "offset " << offset_ << '\n';
  os << "objective " << objective_.entries().size() + objective_.free_terms().size() << '\n';
  dump_functional(os, objective_);
  os << "constraints " << constraints_.size() << '\n';
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    os << "constraint " << i << " rhs " << c.rhs << " terms " << c.lhs.entries().size() + c.lhs.free_terms().size()
       << '\n';
    dump_functional(os, c.lhs);
  }
  return os.str();
}

std::string_view to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

RealMatrix realify(const ComplexMatrix& h) {
  const Eigen::Index k = h.rows();
  RealMatrix t(2 * k, 2 * k);
  t.topLeftCorner(k, k) = h.real();
  t.bottomRightCorner(k, k) = h.real();
  t.topRightCorner(k, k) = -h.imag();
  t.bottomLeftCorner(k, k) = h.imag();
  return t;
}

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point method on real PSD cones.
//
// Internal form (conic LP):  min cᵀx  s.t.  Gx + s = h,  Ax = b,  s ⪰ 0,
// with dual  max −⟨h,z⟩ − bᵀy  s.t.  Gᵀz + Aᵀy + c = 0,  z ⪰ 0.
// The user program is the dual of this one: x are the constraint multipliers,
// z the PSD variables and y the free variables.

namespace {

struct Trip {
  Eigen::Index r;
  Eigen::Index c;
  double v;
};

using SparseSym = std::vector<Trip>;  // upper-triangle entries of a symmetric matrix
using Blocks = std::vector<RealMatrix>;

struct ConeLp {
  std::vector<Eigen::Index> k;                                  // real block sizes
  std::vector<std::vector<std::pair<std::size_t, SparseSym>>> g;  // column i -> (block, entries)
  std::vector<SparseSym> h;
  RealVector c;
  RealMatrix a;  // p x m
  RealVector b;
  Eigen::Index m() const { return c.size(); }
  Eigen::Index p() const { return b.size(); }
};

// Realified image of one Hermitian coefficient entry; complex blocks carry the ½
// so that ⟨½T(A), T(X)⟩ = ⟨A, X⟩.
void push_entry(SparseSym& out, const BlockSpec& spec, Eigen::Index r, Eigen::Index c, cplx v) {
  if (spec.kind == BlockKind::real_symmetric) {
    out.push_back({r, c, v.real()});
    return;
  }
  const Eigen::Index k = spec.dim;
  const double re = 0.5 * v.real();
  const double im = 0.5 * v.imag();
  if (re != 0.0) {
    out.push_back({r, c, re});
    out.push_back({k + r, k + c, re});
  }
  if (im != 0.0 && r != c) {
    out.push_back({c, k + r, im});
    out.push_back({r, k + c, -im});
  }
}

void merge_into(std::vector<std::pair<std::size_t, SparseSym>>& cols, std::size_t block, SparseSym entries) {
  for (auto& [b, list] : cols) {
    if (b == block) {
      list.insert(list.end(), entries.begin(), entries.end());
      return;
    }
  }
  cols.emplace_back(block, std::move(entries));
}

ConeLp to_cone_lp(const ConicProgram& prog) {
  ConeLp lp;
  const auto& blocks = prog.blocks();
  for (const auto& spec : blocks) lp.k.push_back(spec.kind == BlockKind::real_symmetric ? spec.dim : 2 * spec.dim);
  const auto m = static_cast<Eigen::Index>(prog.constraints().size());
  const auto p = static_cast<Eigen::Index>(prog.free_count());
  lp.g.resize(static_cast<std::size_t>(m));
  lp.h.resize(blocks.size());
  lp.c = RealVector::Zero(m);
  lp.a = RealMatrix::Zero(p, m);
  lp.b = RealVector::Zero(p);

  for (const auto& e : prog.objective().entries()) push_entry(lp.h[e.block], blocks[e.block], e.row, e.col, e.value);
  for (const auto& [u, coeff] : prog.objective().free_terms()) lp.b(static_cast<Eigen::Index>(u)) += coeff;

  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& con = prog.constraints()[static_cast<std::size_t>(i)];
    lp.c(i) = -con.rhs;
    std::vector<SparseSym> per_block(blocks.size());
    for (const auto& e : con.lhs.entries()) push_entry(per_block[e.block], blocks[e.block], e.row, e.col, e.value);
    for (std::size_t bidx = 0; bidx < blocks.size(); ++bidx) {
      if (!per_block[bidx].empty()) merge_into(lp.g[static_cast<std::size_t>(i)], bidx, std::move(per_block[bidx]));
    }
    for (const auto& [u, coeff] : con.lhs.free_terms()) lp.a(static_cast<Eigen::Index>(u), i) += coeff;
  }
  return lp;
}

RealMatrix dense(const SparseSym& s, Eigen::Index k) {
  RealMatrix out = RealMatrix::Zero(k, k);
  for (const auto& t : s) {
    out(t.r, t.c) += t.v;
    if (t.r != t.c) out(t.c, t.r) += t.v;
  }
  return out;
}

double inner_sparse(const SparseSym& s, const RealMatrix& x) {
  double acc = 0.0;
  for (const auto& t : s) acc += t.r == t.c ? t.v * x(t.r, t.r) : t.v * (x(t.r, t.c) + x(t.c, t.r));
  return acc;
}

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].cwiseProduct(b[i]).sum();
  return acc;
}

double norm(const Blocks& a) { return std::sqrt(inner(a, a)); }

Blocks zeros(const ConeLp& lp) {
  Blocks out;
  for (auto k : lp.k) out.push_back(RealMatrix::Zero(k, k));
  return out;
}

Blocks h_dense(const ConeLp& lp) {
  Blocks out;
  for (std::size_t b = 0; b < lp.k.size(); ++b) out.push_back(dense(lp.h[b], lp.k[b]));
  return out;
}

Blocks g_mul(const ConeLp& lp, const RealVector& x) {
  Blocks out = zeros(lp);
  for (Eigen::Index i = 0; i < lp.m(); ++i) {
    const double xi = x(i);
    if (xi == 0.0) continue;
    for (const auto& [b, entries] : lp.g[static_cast<std::size_t>(i)]) {
      RealMatrix& blk = out[b];
      for (const auto& t : entries) {
        blk(t.r, t.c) += xi * t.v;
        if (t.r != t.c) blk(t.c, t.r) += xi * t.v;
      }
    }
  }
  return out;
}

RealVector gt_mul(const ConeLp& lp, const Blocks& z) {
  RealVector out = RealVector::Zero(lp.m());
  for (Eigen::Index i = 0; i < lp.m(); ++i) {
    for (const auto& [b, entries] : lp.g[static_cast<std::size_t>(i)]) out(i) += inner_sparse(entries, z[b]);
  }
  return out;
}

// Columns of the scaled operator G̃ x = Σ x_i R⁻¹ G_i R⁻ᵀ, each block stored
// as a full column-major vector so that G̃ᵀG̃ is the Gram matrix of trace inner products.
struct ScaledG {
  std::vector<Eigen::Index> offset;
  RealMatrix cols;
};

ScaledG scale_columns(const ConeLp& lp, const Blocks& rinv) {
  ScaledG out;
  Eigen::Index rows = 0;
  for (auto k : lp.k) {
    out.offset.push_back(rows);
    rows += k * k;
  }
  out.cols = RealMatrix::Zero(rows, lp.m());
  for (Eigen::Index i = 0; i < lp.m(); ++i) {
    for (const auto& [b, entries] : lp.g[static_cast<std::size_t>(i)]) {
      const Eigen::Index k = lp.k[b];
      const RealMatrix& u = rinv[b];
      Eigen::Map<RealMatrix> w(out.cols.col(i).data() + out.offset[b], k, k);
      if (static_cast<Eigen::Index>(entries.size()) > k) {
        w.noalias() = u * dense(entries, k) * u.transpose();
        continue;
      }
      for (const auto& t : entries) {
        if (t.r == t.c) {
          w.noalias() += t.v * u.col(t.r) * u.col(t.r).transpose();
        } else {
          w.noalias() += t.v * u.col(t.r) * u.col(t.c).transpose();
          w.noalias() += t.v * u.col(t.c) * u.col(t.r).transpose();
        }
      }
    }
  }
  return out;
}

Blocks unvec(const ScaledG& sg, const ConeLp& lp, const RealVector& v) {
  Blocks out;
  for (std::size_t b = 0; b < lp.k.size(); ++b) {
    const Eigen::Index k = lp.k[b];
    out.emplace_back(Eigen::Map<const RealMatrix>(v.data() + sg.offset[b], k, k));
  }
  return out;
}

RealVector vec(const ScaledG& sg, const Blocks& x) {
  RealVector out(sg.cols.rows());
  for (std::size_t b = 0; b < x.size(); ++b) {
    Eigen::Map<RealMatrix>(out.data() + sg.offset[b], x[b].rows(), x[b].cols()) = x[b];
  }
  return out;
}

// Solves [[H, Aᵀ], [A, 0]] [u; v] = [r1; r2].
class KktSolver {
 public:
  KktSolver(const RealMatrix& hmat, const RealMatrix& a) : m_(hmat.rows()), p_(a.rows()), h_(hmat) {
    if (p_ == 0) {
      llt_.compute(hmat);
      use_llt_ = llt_.info() == Eigen::Success;
      if (!use_llt_) lu_.compute(regularized(hmat));
      return;
    }
    RealMatrix k = RealMatrix::Zero(m_ + p_, m_ + p_);
    k.topLeftCorner(m_, m_) = hmat;
    k.topRightCorner(m_, p_) = a.transpose();
    k.bottomLeftCorner(p_, m_) = a;
    lu_.compute(k);
  }

  std::pair<RealVector, RealVector> solve(const RealVector& r1, const RealVector& r2) const {
    if (p_ == 0) {
      RealVector u = use_llt_ ? RealVector(llt_.solve(r1)) : RealVector(lu_.solve(r1));
      for (int k = 0; k < 2; ++k) {
        const RealVector res = r1 - h_ * u;
        u += use_llt_ ? RealVector(llt_.solve(res)) : RealVector(lu_.solve(res));
      }
      return {u, RealVector()};
    }
    RealVector rhs(m_ + p_);
    rhs << r1, r2;
    const RealVector sol = lu_.solve(rhs);
    return {sol.head(m_), sol.tail(p_)};
  }

 private:
  static RealMatrix regularized(const RealMatrix& hmat) {
    RealMatrix out = hmat;
    const double scale = std::max(1.0, hmat.diagonal().cwiseAbs().maxCoeff());
    out.diagonal().array() += 1e-14 * scale;
    return out;
  }

  Eigen::Index m_;
  Eigen::Index p_;
  RealMatrix h_;
  bool use_llt_ = false;
  Eigen::LLT<RealMatrix> llt_;
  Eigen::PartialPivLU<RealMatrix> lu_;
};

// Any factor L with X = L Lᵀ (Cholesky, or the symmetric square root when
// rounding makes X look indefinite).
RealMatrix factor(const RealMatrix& x) {
  Eigen::LLT<RealMatrix> llt(x);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(x);
  const RealVector d = es.eigenvalues().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

struct Scaling {
  Blocks r;
  Blocks rinv;
  std::vector<RealVector> lambda;
};

void set_scaling(Scaling& sc, std::size_t b, const RealMatrix& ls, const RealMatrix& lz) {
  Eigen::JacobiSVD<RealMatrix> svd(lz.transpose() * ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector lam = svd.singularValues();
  const RealVector isq = lam.cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  sc.r[b] = ls * svd.matrixV() * isq.asDiagonal();
  sc.rinv[b] = isq.asDiagonal() * svd.matrixU().transpose() * lz.transpose();
  sc.lambda[b] = lam;
}

// Largest α ≤ cap with λ + α·d ⪰ 0 (λ diagonal positive).
double max_step(const RealVector& lam, const RealMatrix& d) {
  const RealVector isq = lam.cwiseSqrt().cwiseInverse();
  RealMatrix t = isq.asDiagonal() * d * isq.asDiagonal();
  t = 0.5 * (t + t.transpose()).eval();
  const double mn = Eigen::SelfAdjointEigenSolver<RealMatrix>(t, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return mn >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / mn;
}

struct Direction {
  RealVector dx;
  RealVector dy;
  double dtau = 0.0;
  double dkappa = 0.0;
  Blocks ds;  // scaled
  Blocks dz;  // scaled
};

// Maximum step to the boundary of every cone, the τ and κ rays included.
double cone_step(const Scaling& sc, const Direction& d, double tau, double kappa) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < sc.lambda.size(); ++b) {
    alpha = std::min(alpha, max_step(sc.lambda[b], d.ds[b]));
    alpha = std::min(alpha, max_step(sc.lambda[b], d.dz[b]));
  }
  if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
  if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
  return alpha;
}

ComplexMatrix decode_block(const RealMatrix& y, const BlockSpec& spec) {
  if (spec.kind == BlockKind::real_symmetric) return y.cast<cplx>();
  const Eigen::Index k = spec.dim;
  ComplexMatrix out(k, k);
  out.real() = 0.5 * (y.topLeftCorner(k, k) + y.bottomRightCorner(k, k));
  out.imag() = 0.5 * (y.bottomLeftCorner(k, k) - y.topRightCorner(k, k));
  return 0.5 * (out + out.adjoint());
}

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& opt) {
  program.validate();
  const ConeLp lp = to_cone_lp(program);
  const Eigen::Index m = lp.m();
  const Eigen::Index p = lp.p();
  const std::size_t nb = lp.k.size();
  double nu = 0.0;
  for (auto k : lp.k) nu += static_cast<double>(k);

  const Blocks hd = h_dense(lp);
  const double resx0 = std::max(1.0, lp.c.norm());
  const double resy0 = std::max(1.0, lp.b.norm());
  const double resz0 = std::max(1.0, norm(hd));

  // Starting point: least-squares primal and least-norm dual, shifted into the cone.
  Blocks ident = zeros(lp);
  for (auto& blk : ident) blk.setIdentity();
  RealVector x;
  RealVector y;
  Blocks s;
  Blocks z;
  {
    const ScaledG g0 = scale_columns(lp, ident);
    const KktSolver kkt0(g0.cols.transpose() * g0.cols, lp.a);
    auto [x0, y0] = kkt0.solve(gt_mul(lp, hd), lp.b);
    x = x0;
    s = hd;
    const Blocks gx = g_mul(lp, x);
    for (std::size_t b = 0; b < nb; ++b) s[b] -= gx[b];
    auto [u0, w0] = kkt0.solve(-lp.c, RealVector::Zero(p));
    y = p > 0 ? RealVector(w0) : RealVector();
    z = g_mul(lp, u0);
    auto shift = [&](Blocks& v) {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& blk : v) worst = std::max(worst, -min_eigenvalue(blk));
      const double nrm = norm(v);
      if (worst >= -1e-8 * std::max(nrm, 1.0)) {
        for (auto& blk : v) blk.diagonal().array() += 1.0 + worst;
      }
    };
    shift(s);
    shift(z);
  }
  double tau = 1.0;
  double kappa = 1.0;

  Scaling sc;
  sc.r.resize(nb);
  sc.rinv.resize(nb);
  sc.lambda.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) set_scaling(sc, b, factor(s[b]), factor(z[b]));

  ConicSolution sol;
  SolveStatus status = SolveStatus::numerical_failure;
  double pres = 0.0;
  double dres = 0.0;
  int it = 0;
  for (;; ++it) {
    // Residuals of the homogeneous embedding.
    const Blocks gx = g_mul(lp, x);
    const RealVector gtz = gt_mul(lp, z);
    const double hz = inner(hd, z);
    const double by = p > 0 ? lp.b.dot(y) : 0.0;
    const double cx = lp.c.dot(x);
    RealVector rx = gtz + lp.c * tau;
    if (p > 0) rx += lp.a.transpose() * y;
    RealVector ry = p > 0 ? RealVector(lp.b * tau - lp.a * x) : RealVector();
    Blocks rz = zeros(lp);
    for (std::size_t b = 0; b < nb; ++b) rz[b] = hd[b] * tau - gx[b] - s[b];
    const double rt = -cx - by - hz - kappa;

    double sz = 0.0;
    for (const auto& lam : sc.lambda) sz += lam.squaredNorm();
    const double mu = (sz + tau * kappa) / (nu + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(hz + by) / tau;
    pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, norm(rz) / resz0) / tau;
    dres = rx.norm() / resx0 / tau;
    const double scale = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    const bool gap_ok = std::abs(pcost - dcost) <= opt.gap_tol * scale && sz / (tau * tau) <= opt.gap_tol * scale;
    // Residual infeasibility can let the reported dual overshoot the primal; keep going until it does not.
    const bool weak_ok = dcost - pcost <= 0.1 * opt.gap_tol * scale;
    if (opt.verbose) {
      std::fprintf(stderr, "%3d pcost % .10e dcost % .10e gap %.2e pres %.2e dres %.2e tau %.2e kappa %.2e\n", it,
                   pcost, dcost, sz / (tau * tau), pres, dres, tau, kappa);
    }
    if (pres <= opt.feas_tol && dres <= opt.feas_tol && gap_ok && weak_ok) {
      status = SolveStatus::optimal;
      break;
    }
    // Infeasibility certificates.
    if (hz + by < 0.0) {
      RealVector hres = gtz;
      if (p > 0) hres += lp.a.transpose() * y;
      if (hres.norm() / resx0 / -(hz + by) <= opt.feas_tol) {
        status = SolveStatus::unbounded;  // internal primal infeasible: the user program is unbounded
        break;
      }
    }
    if (cx < 0.0) {
      Blocks gs = gx;
      for (std::size_t b = 0; b < nb; ++b) gs[b] += s[b];
      const double ax = p > 0 ? (lp.a * x).norm() / resy0 : 0.0;
      if (std::max(ax, norm(gs) / resz0) / -cx <= opt.feas_tol) {
        status = SolveStatus::infeasible;  // internal dual infeasible: the user program is infeasible
        break;
      }
    }
    if (it >= opt.max_iter) break;

    // Newton system in the NT-scaled space: G̃ = R⁻¹GR⁻ᵀ, h̃ = R⁻¹hR⁻ᵀ.
    const ScaledG sg = scale_columns(lp, sc.rinv);
    const RealMatrix hmat = sg.cols.transpose() * sg.cols;
    const KktSolver kkt(hmat, lp.a);
    Blocks hs(nb);
    Blocks rzs(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      hs[b] = sc.rinv[b] * hd[b] * sc.rinv[b].transpose();
      rzs[b] = sc.rinv[b] * rz[b] * sc.rinv[b].transpose();
    }
    const RealVector hs_vec = vec(sg, hs);
    auto [dx2, dy2] = kkt.solve(sg.cols.transpose() * hs_vec - lp.c, lp.b);
    const RealVector dz2 = sg.cols * dx2 - hs_vec;
    const double coef2 = lp.c.dot(dx2) + (p > 0 ? lp.b.dot(dy2) : 0.0) + hs_vec.dot(dz2) - kappa / tau;

    // rc: scaled complementarity target per block; rk: the τκ target.
    auto newton = [&](double sigma, const std::vector<RealMatrix>& rc, double rk) {
      const double eta = -(1.0 - sigma);
      Blocks q(nb);
      Blocks t(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        const RealVector& lam = sc.lambda[b];
        q[b] = rc[b];
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
          for (Eigen::Index j = 0; j < lam.size(); ++j) q[b](i, j) *= 2.0 / (lam(i) + lam(j));
        }
        t[b] = q[b] + eta * rzs[b];
      }
      const RealVector t_vec = vec(sg, t);
      auto [dx1, dy1] = kkt.solve(eta * rx - sg.cols.transpose() * t_vec, p > 0 ? RealVector(-eta * ry) : RealVector());
      const RealVector dz1 = sg.cols * dx1 + t_vec;
      const double c1 = lp.c.dot(dx1) + (p > 0 ? lp.b.dot(dy1) : 0.0) + hs_vec.dot(dz1);
      Direction d;
      d.dtau = (-c1 - eta * rt - rk / tau) / coef2;
      d.dx = dx1 + d.dtau * dx2;
      d.dy = p > 0 ? RealVector(dy1 + d.dtau * dy2) : RealVector();
      d.dkappa = (rk - kappa * d.dtau) / tau;
      d.dz = unvec(sg, lp, RealVector(dz1 + d.dtau * dz2));
      d.ds.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        d.dz[b] = 0.5 * (d.dz[b] + d.dz[b].transpose()).eval();
        d.ds[b] = q[b] - d.dz[b];
      }
      return d;
    };

    std::vector<RealMatrix> rc(nb);
    Direction d;
    if (opt.predictor_corrector) {
      for (std::size_t b = 0; b < nb; ++b) rc[b] = RealMatrix((-sc.lambda[b].cwiseAbs2()).asDiagonal());
      const Direction aff = newton(0.0, rc, -tau * kappa);
      const double alpha_aff = std::min(1.0, cone_step(sc, aff, tau, kappa));
      const double sigma = std::pow(std::clamp(1.0 - alpha_aff, 0.0, 1.0), 3);
      for (std::size_t b = 0; b < nb; ++b) {
        RealMatrix corr = aff.ds[b] * aff.dz[b];
        corr = 0.5 * (corr + corr.transpose()).eval();
        rc[b] = RealMatrix((-sc.lambda[b].cwiseAbs2()).asDiagonal()) - corr;
        rc[b].diagonal().array() += sigma * mu;
      }
      d = newton(sigma, rc, sigma * mu - tau * kappa - aff.dtau * aff.dkappa);
    } else {
      for (std::size_t b = 0; b < nb; ++b) {
        rc[b] = RealMatrix((-sc.lambda[b].cwiseAbs2()).asDiagonal());
        rc[b].diagonal().array() += opt.sigma * mu;
      }
      d = newton(opt.sigma, rc, opt.sigma * mu - tau * kappa);
    }

    const double alpha = std::min(1.0, opt.step_fraction * cone_step(sc, d, tau, kappa));
    if (!(alpha > 1e-12) || !d.dx.allFinite()) break;

    x += alpha * d.dx;
    if (p > 0) y += alpha * d.dy;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
    for (std::size_t b = 0; b < nb; ++b) {
      RealMatrix st = alpha * d.ds[b];
      RealMatrix zt = alpha * d.dz[b];
      st.diagonal() += sc.lambda[b];
      zt.diagonal() += sc.lambda[b];
      const RealMatrix ls = sc.r[b] * factor(0.5 * (st + st.transpose()));
      const RealMatrix lz = sc.rinv[b].transpose() * factor(0.5 * (zt + zt.transpose()));
      s[b] = ls * ls.transpose();
      z[b] = lz * lz.transpose();
      set_scaling(sc, b, ls, lz);
    }
  }

  // Report in the user's picture: z/τ are the PSD variables, y/τ the free ones,
  // x/τ the constraint multipliers.
  const double inv_tau = tau > 0.0 ? 1.0 / tau : 0.0;
  sol.status = status;
  sol.iterations = it;
  sol.primal_residual = dres;
  sol.dual_residual = pres;
  const double hz = inner(hd, z);
  const double by = p > 0 ? lp.b.dot(y) : 0.0;
  sol.primal_value = (hz + by) * inv_tau + program.offset();
  sol.dual_value = -lp.c.dot(x) * inv_tau + program.offset();
  sol.gap = std::abs(sol.primal_value - sol.dual_value);
  sol.multipliers = x * inv_tau;
  sol.free_values = p > 0 ? RealVector(y * inv_tau) : RealVector::Zero(0);
  for (std::size_t b = 0; b < nb; ++b) {
    const BlockSpec& spec = program.blocks()[b];
    sol.blocks.push_back(decode_block(z[b] * inv_tau, spec));
    const double mult = spec.kind == BlockKind::complex_hermitian ? 2.0 : 1.0;
    sol.dual_slacks.push_back(mult * decode_block(s[b] * inv_tau, spec));
  }
  (void)m;
  return sol;
}

// ---------------------------------------------------------------------------
// Holevo's lemma

namespace {

void check_lemma_inputs(const RealMatrix& w, const RealMatrix& a, const RealMatrix& b) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n || a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
    fail(ErrorKind::validation, "Holevo lemma: shape mismatch");
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::validation, "A must be symmetric");
  if ((b + b.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::validation, "B must be antisymmetric");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::validation, "W must be symmetric");
  if (min_eigenvalue(w) <= 1e-10) fail(ErrorKind::validation, "W must be strictly positive");
}

}  // namespace

double holevo_lemma_value(const RealMatrix& w, const RealMatrix& a, const RealMatrix& b) {
  check_lemma_inputs(w, a, b);
  return (w * a).trace() + trace_abs_congruence(w, b);
}

}  // namespace qbayes
