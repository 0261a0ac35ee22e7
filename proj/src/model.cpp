#include "qbayes/model.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qbayes/rng.hpp"

namespace qbayes {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kWeightSumTol = 1e-12;

void check_weight_matrix(const RealMatrix& w, const char* what) {
  if (w.rows() != w.cols()) fail(ErrorKind::validation, std::string(what) + " must be square");
  if (!w.allFinite()) fail(ErrorKind::validation, std::string(what) + " has non-finite entries");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    fail(ErrorKind::validation, std::string(what) + " is not symmetric");
  }
  if (w.rows() > 0 && min_eigenvalue(w) < -kPsdTol) {
    fail(ErrorKind::validation, std::string(what) + " is not positive semidefinite");
  }
}

// Deterministic pairwise reduction over [lo, hi).
template <typename T, typename F>
T pairwise_sum(std::size_t lo, std::size_t hi, const F& term) {
  if (hi - lo == 1) return term(lo);
  const std::size_t mid = lo + (hi - lo) / 2;
  T left = pairwise_sum<T>(lo, mid, term);
  left += pairwise_sum<T>(mid, hi, term);
  return left;
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightSpec

WeightSpec WeightSpec::constant(RealMatrix w) {
  check_weight_matrix(w, "weight matrix");
  WeightSpec spec;
  spec.constant_ = true;
  spec.ws_.push_back(std::move(w));
  return spec;
}

WeightSpec WeightSpec::per_point(std::vector<RealMatrix> ws) {
  if (ws.empty()) fail(ErrorKind::validation, "per-point weight list is empty");
  for (const auto& w : ws) {
    check_weight_matrix(w, "per-point weight matrix");
    if (w.rows() != ws.front().rows()) fail(ErrorKind::validation, "per-point weight matrices differ in size");
  }
  WeightSpec spec;
  spec.constant_ = false;
  spec.ws_ = std::move(ws);
  return spec;
}

Eigen::Index WeightSpec::dim() const { return ws_.empty() ? 0 : ws_.front().rows(); }

const RealMatrix& WeightSpec::at(std::size_t m) const {
  if (ws_.empty()) fail(ErrorKind::validation, "weight specification is empty");
  return constant_ ? ws_.front() : ws_.at(m);
}

const RealMatrix& WeightSpec::constant_matrix() const {
  if (!constant_ || ws_.empty()) {
    fail(ErrorKind::unsupported_configuration, "a constant weight matrix is required");
  }
  return ws_.front();
}

// ---------------------------------------------------------------------------
// StatisticalModel

StatisticalModel::StatisticalModel(std::vector<GridPoint> points, WeightSpec weight,
                                   std::optional<std::vector<RealVector>> prior_score)
    : points_(std::move(points)), weight_(std::move(weight)), score_(std::move(prior_score)) {
  if (points_.empty()) fail(ErrorKind::empty_model, "model has no grid points");
  n_ = points_.front().theta.size();
  d_ = points_.front().state.dim();
  if (n_ == 0) fail(ErrorKind::validation, "parameter vectors are empty");
  double total = 0.0;
  for (const auto& p : points_) {
    if (p.theta.size() != n_) fail(ErrorKind::validation, "grid points have different parameter counts");
    if (!p.theta.allFinite()) fail(ErrorKind::validation, "grid point has non-finite parameters");
    if (p.state.dim() != d_) fail(ErrorKind::validation, "grid points have different Hilbert dimensions");
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) fail(ErrorKind::validation, "prior weight must be >= 0");
    if (p.derivatives) {
      if (static_cast<Eigen::Index>(p.derivatives->size()) != n_) {
        fail(ErrorKind::validation, "state derivative count differs from parameter count");
      }
      for (const auto& dd : *p.derivatives) {
        if (dd.dim() != d_) fail(ErrorKind::validation, "state derivative has wrong dimension");
      }
    }
    total += p.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "prior weights sum to " << total << ", expected 1";
    fail(ErrorKind::validation, os.str());
  }
  if (weight_.dim() != n_) fail(ErrorKind::validation, "weight matrix size differs from parameter count");
  if (!weight_.is_constant() && weight_.matrices().size() != points_.size()) {
    fail(ErrorKind::validation, "per-point weight count differs from grid size");
  }
  if (score_) {
    if (score_->size() != points_.size()) fail(ErrorKind::validation, "prior score count differs from grid size");
    for (const auto& s : *score_) {
      if (s.size() != n_) fail(ErrorKind::validation, "prior score has wrong length");
    }
  }
}

bool StatisticalModel::has_derivatives() const {
  return std::all_of(points_.begin(), points_.end(), [](const GridPoint& p) { return p.derivatives.has_value(); });
}

StatisticalModel StatisticalModel::conjugated(const ComplexMatrix& u) const {
  std::vector<GridPoint> pts = points_;
  for (auto& p : pts) {
    const ComplexMatrix rho = u * p.state.mat() * u.adjoint();
    // Renormalize against rounding so the unit-trace check stays exact.
    p.state = DensityMatrix(ComplexMatrix(rho / rho.trace().real()));
    if (p.derivatives) {
      for (auto& dd : *p.derivatives) dd = HermitianMatrix(ComplexMatrix(u * dd.mat() * u.adjoint()));
    }
  }
  return {std::move(pts), weight_, score_};
}

StatisticalModel StatisticalModel::permuted(std::span<const std::size_t> order) const {
  if (order.size() != points_.size()) fail(ErrorKind::validation, "permutation has wrong length");
  std::vector<GridPoint> pts;
  std::vector<RealMatrix> ws;
  std::optional<std::vector<RealVector>> score;
  if (score_) score.emplace();
  for (std::size_t i : order) {
    pts.push_back(points_.at(i));
    if (!weight_.is_constant()) ws.push_back(weight_.at(i));
    if (score_) score->push_back(score_->at(i));
  }
  WeightSpec w = weight_.is_constant() ? weight_ : WeightSpec::per_point(std::move(ws));
  return {std::move(pts), std::move(w), std::move(score)};
}

StatisticalModel StatisticalModel::with_weight(WeightSpec weight) const { return {points_, std::move(weight), score_}; }

// ---------------------------------------------------------------------------
// Moments

BayesMoments build_moments(const StatisticalModel& model) {
  const auto& pts = model.points();
  const std::size_t k = pts.size();
  const Eigen::Index n = model.n();
  const Eigen::Index d = model.d();

  const ComplexMatrix sb = pairwise_sum<ComplexMatrix>(0, k, [&](std::size_t m) {
    return ComplexMatrix(pts[m].weight * pts[m].state.mat());
  });
  std::vector<HermitianMatrix> db;
  for (Eigen::Index j = 0; j < n; ++j) {
    db.emplace_back(pairwise_sum<ComplexMatrix>(0, k, [&](std::size_t m) {
      return ComplexMatrix(pts[m].weight * pts[m].theta(j) * pts[m].state.mat());
    }));
  }
  RealMatrix second = pairwise_sum<RealMatrix>(0, k, [&](std::size_t m) {
    return RealMatrix(pts[m].weight * pts[m].theta * pts[m].theta.transpose());
  });
  second = 0.5 * (second + second.transpose());
  const RealVector mean = pairwise_sum<RealVector>(0, k, [&](std::size_t m) {
    return RealVector(pts[m].weight * pts[m].theta);
  });
  const double wbar = pairwise_sum<double>(0, k, [&](std::size_t m) {
    return pts[m].weight * pts[m].theta.dot(model.weight().at(m) * pts[m].theta);
  });
  // Σ π_m S_m has trace 1 up to the weight-sum tolerance; renormalize before validating.
  ComplexMatrix sbn = sb / sb.trace().real();
  (void)d;
  return {DensityMatrix(sbn), std::move(db), std::move(second), mean, wbar};
}

ExtendedMoments build_extended_moments(const StatisticalModel& model) {
  const auto& pts = model.points();
  const std::size_t k = pts.size();
  const Eigen::Index n = model.n();
  const Eigen::Index d = model.d();

  ExtendedMoments em;
  em.constant_weight = model.weight().is_constant();
  for (std::size_t m = 0; m < k; ++m) {
    em.per_point_s.push_back(ExtendedOperator::tensor(model.weight().at(m), pts[m].state.mat()));
    em.weights.push_back(pts[m].weight);
    em.weight_matrices.push_back(model.weight().at(m));
    em.states.push_back(pts[m].state);
  }
  em.s_bar = pairwise_sum<ExtendedOperator>(0, k, [&](std::size_t m) { return pts[m].weight * em.per_point_s[m]; });
  for (Eigen::Index j = 0; j < n; ++j) {
    em.d_bar.emplace_back(pairwise_sum<ComplexMatrix>(0, k, [&](std::size_t m) {
      const double coeff = model.weight().at(m).row(j).dot(pts[m].theta);
      return ComplexMatrix(pts[m].weight * coeff * pts[m].state.mat());
    }));
  }
  em.w_bar = pairwise_sum<double>(0, k, [&](std::size_t m) {
    return pts[m].weight * pts[m].theta.dot(model.weight().at(m) * pts[m].theta);
  });
  BayesMoments plain = build_moments(model);
  em.s_b = std::move(plain.s_b);
  em.d_b = std::move(plain.d_b);
  (void)d;
  return em;
}

ExtendedMoments extended_from_moments(const BayesMoments& moments, const RealMatrix& w) {
  check_weight_matrix(w, "weight matrix");
  const auto n = static_cast<Eigen::Index>(moments.d_b.size());
  if (w.rows() != n || moments.m.rows() != n) fail(ErrorKind::validation, "moment and weight sizes disagree");
  ExtendedMoments em;
  em.s_bar = ExtendedOperator::tensor(w, moments.s_b.mat());
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexMatrix acc = ComplexMatrix::Zero(moments.s_b.dim(), moments.s_b.dim());
    for (Eigen::Index k = 0; k < n; ++k) acc += w(j, k) * moments.d_b[k].mat();
    em.d_bar.emplace_back(acc);
  }
  em.w_bar = (w * moments.m).trace();
  em.constant_weight = true;
  em.s_b = moments.s_b;
  em.d_b = moments.d_b;
  em.weight_matrices.push_back(w);
  return em;
}

// ---------------------------------------------------------------------------
// Zoo

namespace {

DensityMatrix bloch_state(double x, double y, double z) {
  if (x * x + y * y + z * z > 1.0 + 1e-12) {
    fail(ErrorKind::validation, "Bloch vector leaves the unit ball; state would not be positive");
  }
  const ComplexMatrix rho = 0.5 * (ComplexMatrix::Identity(2, 2) + x * pauli::x() + y * pauli::y() + z * pauli::z());
  return DensityMatrix(rho);
}

RealMatrix identity_weight(Eigen::Index n) { return RealMatrix::Identity(n, n); }

}  // namespace

StatisticalModel classical_binary(double a, double r) {
  std::vector<GridPoint> pts;
  for (double sign : {1.0, -1.0}) {
    GridPoint p;
    p.theta = RealVector::Constant(1, sign * a);
    p.weight = 0.5;
    p.state = bloch_state(0.0, 0.0, sign * r);
    pts.push_back(std::move(p));
  }
  return {std::move(pts), WeightSpec::constant(identity_weight(1))};
}

StatisticalModel correlated_pair(double a, double r) {
  std::vector<GridPoint> pts;
  for (double sign : {1.0, -1.0}) {
    GridPoint p;
    p.theta = RealVector::Constant(2, sign * a);
    p.weight = 0.5;
    p.state = bloch_state(0.0, 0.0, sign * r);
    pts.push_back(std::move(p));
  }
  return {std::move(pts), WeightSpec::constant(identity_weight(2))};
}

StatisticalModel qubit_xy(double b, int points_per_ring, int rings) {
  if (points_per_ring < 1 || rings < 1) fail(ErrorKind::validation, "qubit_xy: grid must be positive");
  if (b < 0.0) fail(ErrorKind::validation, "qubit_xy: radius must be non-negative");
  const int total = points_per_ring * rings;
  std::vector<GridPoint> pts;
  for (int ring = 1; ring <= rings; ++ring) {
    const double radius = b * static_cast<double>(ring) / static_cast<double>(rings);
    for (int k = 0; k < points_per_ring; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / points_per_ring;
      // Exact axis values for the quarter-turn angles keep symmetric grids exact.
      double c = std::cos(angle);
      double s = std::sin(angle);
      if (4 * k % points_per_ring == 0) {
        const int quarter = (4 * k / points_per_ring) % 4;
        c = quarter == 0 ? 1.0 : quarter == 2 ? -1.0 : 0.0;
        s = quarter == 1 ? 1.0 : quarter == 3 ? -1.0 : 0.0;
      }
      GridPoint p;
      p.theta = RealVector(2);
      p.theta << radius * c, radius * s;
      p.weight = 1.0 / total;
      p.state = bloch_state(p.theta(0), p.theta(1), 0.0);
      ComplexMatrix dx = 0.5 * pauli::x();
      ComplexMatrix dy = 0.5 * pauli::y();
      p.derivatives = std::vector<HermitianMatrix>{HermitianMatrix(dx), HermitianMatrix(dy)};
      pts.push_back(std::move(p));
    }
  }
  return {std::move(pts), WeightSpec::constant(identity_weight(2))};
}

StatisticalModel qubit_z_line(int grid, double half_width) {
  if (grid < 1) fail(ErrorKind::validation, "qubit_z_line: grid must be positive");
  std::vector<GridPoint> pts;
  std::vector<RealVector> score;
  for (int k = 0; k < grid; ++k) {
    const double theta = grid == 1 ? 0.0 : -half_width + 2.0 * half_width * k / (grid - 1);
    GridPoint p;
    p.theta = RealVector::Constant(1, theta);
    p.weight = 1.0 / grid;
    p.state = bloch_state(0.0, 0.0, theta);
    p.derivatives = std::vector<HermitianMatrix>{HermitianMatrix(ComplexMatrix(0.5 * pauli::z()))};
    pts.push_back(std::move(p));
    // Uniform prior: the log-density is flat on the grid interior.
    score.push_back(RealVector::Zero(1));
  }
  return {std::move(pts), WeightSpec::constant(identity_weight(1)), std::move(score)};
}

StatisticalModel point_mass(const RealVector& theta, const DensityMatrix& state, const RealMatrix& w) {
  GridPoint p;
  p.theta = theta;
  p.weight = 1.0;
  p.state = state;
  return {std::vector<GridPoint>{std::move(p)}, WeightSpec::constant(w)};
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = cplx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx diag = r(j, j);
    if (std::abs(diag) > 0.0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

DensityMatrix random_state(Rng& rng, Eigen::Index dim, double mix) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = cplx(rng.normal(), rng.normal());
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - mix) * rho;
  rho.diagonal().array() += mix / static_cast<double>(dim);
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

HermitianMatrix random_hermitian(Rng& rng, Eigen::Index dim) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = cplx(rng.normal(), rng.normal());
  return HermitianMatrix(g);
}

RealMatrix random_spd(Rng& rng, Eigen::Index dim, double floor) {
  RealMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  RealMatrix w = g * g.transpose() / static_cast<double>(dim);
  w.diagonal().array() += floor;
  return 0.5 * (w + w.transpose());
}

StatisticalModel random_model(const RandomModelOptions& options) {
  if (options.n < 1 || options.d < 1) fail(ErrorKind::validation, "random_model: n and d must be positive");
  const int count = options.points > 0 ? options.points : options.n + 3;
  Rng rng(options.seed);
  std::vector<double> raw(count);
  for (auto& x : raw) x = 0.2 + rng.uniform();
  double total = 0.0;
  for (double x : raw) total += x;
  std::vector<GridPoint> pts;
  std::vector<RealMatrix> ws;
  double running = 0.0;
  for (int m = 0; m < count; ++m) {
    GridPoint p;
    p.theta = RealVector(options.n);
    for (Eigen::Index j = 0; j < options.n; ++j) p.theta(j) = rng.uniform(-1.0, 1.0);
    // Last weight absorbs rounding so the masses sum to one.
    p.weight = m + 1 == count ? 1.0 - running : raw[m] / total;
    running += p.weight;
    p.state = random_state(rng, options.d);
    pts.push_back(std::move(p));
    if (options.per_point_weight) ws.push_back(random_spd(rng, options.n));
  }
  WeightSpec w = options.per_point_weight ? WeightSpec::per_point(std::move(ws))
                                          : WeightSpec::constant(random_spd(rng, options.n));
  return {std::move(pts), std::move(w)};
}

std::vector<std::string> zoo_names() {
  return {"classical_binary", "correlated_pair", "qubit_xy", "qubit_z_line", "random_model", "point_mass"};
}

StatisticalModel model_zoo(std::string_view name, std::span<const double> params, int grid_size) {
  auto need = [&](std::size_t count) {
    if (params.size() < count) {
      std::ostringstream os;
      os << name << " needs " << count << " parameters, got " << params.size();
      fail(ErrorKind::validation, os.str());
    }
  };
  auto as_int = [](double v) { return static_cast<int>(std::lround(v)); };
  if (name == "classical_binary") {
    need(2);
    return classical_binary(params[0], params[1]);
  }
  if (name == "correlated_pair") {
    need(2);
    return correlated_pair(params[0], params[1]);
  }
  if (name == "qubit_xy") {
    need(1);
    const int grid = params.size() > 1 ? as_int(params[1]) : (grid_size > 0 ? grid_size : 4);
    const int rings = params.size() > 2 ? as_int(params[2]) : 1;
    return qubit_xy(params[0], grid, rings);
  }
  if (name == "qubit_z_line") {
    const int grid = !params.empty() ? as_int(params[0]) : (grid_size > 0 ? grid_size : 3);
    const double half = params.size() > 1 ? params[1] : 0.5;
    return qubit_z_line(grid, half);
  }
  if (name == "random_model") {
    need(3);
    RandomModelOptions opt;
    opt.n = as_int(params[0]);
    opt.d = as_int(params[1]);
    opt.seed = static_cast<std::uint64_t>(std::llround(params[2]));
    opt.points = params.size() > 3 ? as_int(params[3]) : grid_size;
    opt.per_point_weight = params.size() > 4 && params[4] != 0.0;
    return random_model(opt);
  }
  if (name == "point_mass") {
    // point_mass(n, d, seed): random full-rank state at a random parameter value.
    need(3);
    Rng rng(static_cast<std::uint64_t>(std::llround(params[2])));
    RealVector theta(as_int(params[0]));
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = rng.uniform(-1.0, 1.0);
    const DensityMatrix state = random_state(rng, as_int(params[1]));
    return point_mass(theta, state, RealMatrix::Identity(theta.size(), theta.size()));
  }
  fail(ErrorKind::validation, "unknown zoo model '" + std::string(name) + "'");
}

}  // namespace qbayes
