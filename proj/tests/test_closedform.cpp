#include "qbayes/closedform.hpp"
#include "support.hpp"

using namespace qbayes;
using namespace qbayes::test;

namespace {

// S_B = diag(0.75, 0.25), D_B = 0.1(σx, σy), M = 0.1 I.
BayesMoments anisotropic_moments() {
  BayesMoments mo;
  mo.s_b = DensityMatrix(cm({{0.75, 0}, {0, 0.25}}));
  mo.d_b = {HermitianMatrix(ComplexMatrix(0.1 * pauli::x())), HermitianMatrix(ComplexMatrix(0.1 * pauli::y()))};
  mo.m = 0.1 * RealMatrix::Identity(2, 2);
  mo.theta_bar = RealVector::Zero(2);
  mo.w_bar = 0.2;
  return mo;
}

BayesMoments conjugate(const BayesMoments& mo, const ComplexMatrix& u) {
  BayesMoments out = mo;
  out.s_b = DensityMatrix(ComplexMatrix(u * mo.s_b.mat() * u.adjoint()));
  for (auto& d : out.d_b) d = HermitianMatrix(ComplexMatrix(u * d.mat() * u.adjoint()));
  return out;
}

// Diagonal states with parameter-dependent populations: a classical model.
StatisticalModel commuting_model(Rng& rng) {
  std::vector<GridPoint> pts;
  for (int m = 0; m < 5; ++m) {
    RealVector p(3);
    for (int i = 0; i < 3; ++i) p(i) = 0.2 + rng.uniform();
    p /= p.sum();
    GridPoint g;
    g.theta = vec({rng.normal(), rng.normal()});
    g.weight = 0.2;
    g.state = DensityMatrix(ComplexMatrix(p.cast<cplx>().asDiagonal()));
    pts.push_back(g);
  }
  return StatisticalModel(pts, WeightSpec::constant(random_spd(rng, 2)));
}

}  // namespace

TEST_CASE("SLD bound examples") {
  const RealVector th = vec({0.4, -0.2});
  const StatisticalModel pm = point_mass(th, DensityMatrix(cm({{0.6, 0.1}, {0.1, 0.4}})), RealMatrix::Identity(2, 2));
  CHECK(std::abs(sld_bound(build_moments(pm), RealMatrix::Identity(2, 2)).value) < 1e-12);

  const SldBound cb = sld_bound(build_moments(classical_binary(1.0, 0.6)), RealMatrix::Identity(1, 1));
  CHECK(cb.value == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(max_diff(cb.package.l[0].mat(), ComplexMatrix(0.6 * pauli::z())) < 1e-12);
  CHECK(cb.package.k(0, 0) == doctest::Approx(0.36));

  const SldBound an = sld_bound(anisotropic_moments(), RealMatrix::Identity(2, 2));
  CHECK(an.value == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(max_diff(an.package.k, RealMatrix(0.04 * RealMatrix::Identity(2, 2))) < 1e-12);
}

TEST_CASE("RLD bound examples") {
  const RldBound cb = rld_bound(build_moments(classical_binary(1.0, 0.6)), RealMatrix::Identity(1, 1));
  CHECK(cb.value == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(std::abs(cb.package.ktilde(0, 0).imag()) < 1e-15);

  const RldBound an = rld_bound(anisotropic_moments(), RealMatrix::Identity(2, 2));
  CHECK(an.value == doctest::Approx(0.44 / 3.0).epsilon(1e-12));
  CHECK(an.package.ktilde(0, 0).real() == doctest::Approx(0.16 / 3.0));
  CHECK(std::abs(an.package.ktilde(0, 1).imag()) == doctest::Approx(0.08 / 3.0));

  const StatisticalModel pm = point_mass(vec({0.4, -0.2}), DensityMatrix(cm({{0.6, 0.1}, {0.1, 0.4}})),
                                         RealMatrix::Identity(2, 2));
  CHECK(std::abs(rld_bound(build_moments(pm), RealMatrix::Identity(2, 2)).value) < 1e-12);
}

TEST_CASE("RLD with singular weight warns and stays finite") {
  RealMatrix w = RealMatrix::Zero(2, 2);
  w(0, 0) = 1.0;
  const RldBound b = rld_bound(anisotropic_moments(), w);
  CHECK(std::isfinite(b.value));
  CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("SLD Fisher information of the diagonal qubit family") {
  const HermitianMatrix dz(ComplexMatrix(0.5 * pauli::z()));
  const DensityMatrix s(ComplexMatrix(0.5 * (eye(2) + 0.5 * pauli::z())));
  CHECK(sld_fisher_point(s, {dz})(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(sld_fisher_point(DensityMatrix::maximally_mixed(2), {dz})(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // Commuting derivatives: classical Fisher information Σ ∂p_i ∂p_j / p.
  const RealVector p = vec({0.5, 0.3, 0.2});
  const RealVector d1 = vec({0.1, -0.05, -0.05});
  const RealVector d2 = vec({-0.2, 0.1, 0.1}) + vec({0, 0.03, -0.03});
  const RealMatrix jq = sld_fisher_point(DensityMatrix(ComplexMatrix(p.cast<cplx>().asDiagonal())),
                                         {HermitianMatrix(RealMatrix(d1.asDiagonal())), HermitianMatrix(RealMatrix(d2.asDiagonal()))});
  const double c11 = (d1.array().square() / p.array()).sum();
  const double c12 = (d1.array() * d2.array() / p.array()).sum();
  const double c22 = (d2.array().square() / p.array()).sum();
  CHECK(jq(0, 0) == doctest::Approx(c11).epsilon(1e-12));
  CHECK(jq(0, 1) == doctest::Approx(c12).epsilon(1e-12));
  CHECK(jq(1, 1) == doctest::Approx(c22).epsilon(1e-12));

  CHECK_THROWS_AS(sld_fisher_point(s, {HermitianMatrix(eye(2))}), Error);
}

TEST_CASE("van Tree bound") {
  const VanTreeBound z = van_tree_bound(qubit_z_line(3));
  CHECK(z.value == doctest::Approx(1.0 / ((4.0 / 3.0 + 1.0 + 4.0 / 3.0) / 3.0)).epsilon(1e-12));
  CHECK(z.value == doctest::Approx(0.818182).epsilon(1e-6));

  // J^Q = 1 everywhere (θ = 0 states) and J(π) = 0.5.
  std::vector<GridPoint> pts;
  std::vector<RealVector> score;
  for (double s : {-1.0, 0.0, 1.0}) {
    GridPoint g;
    g.theta = RealVector::Constant(1, s);
    g.weight = s == 0.0 ? 0.5 : 0.25;
    g.state = DensityMatrix::maximally_mixed(2);
    g.derivatives = std::vector<HermitianMatrix>{HermitianMatrix(ComplexMatrix(0.5 * pauli::z()))};
    pts.push_back(g);
    score.push_back(RealVector::Constant(1, s));
  }
  const StatisticalModel m(pts, WeightSpec::constant(RealMatrix::Identity(1, 1)), score);
  CHECK(van_tree_bound(m).value == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
}

TEST_CASE("van Tree needs derivatives and scores") {
  try {
    van_tree_bound(classical_binary(1.0, 0.6));
    FAIL("expected capability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capability);
  }
}

TEST_CASE("Gram matrices are PSD and K-tilde is Hermitian on random models") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const StatisticalModel m = random_model({2 + static_cast<int>(seed % 2), 2 + static_cast<int>(seed % 3), seed, 0, false});
    const BayesMoments mo = build_moments(m);
    const RealMatrix& w = m.weight().constant_matrix();
    const SldBound s = sld_bound(mo, w);
    const RldBound r = rld_bound(mo, w);
    CHECK(min_eigenvalue(s.package.k) >= -1e-10);
    CHECK(max_diff(r.package.ktilde, ComplexMatrix(r.package.ktilde.adjoint())) <= 1e-10);
    CHECK(min_eigenvalue(RealMatrix(r.package.ktilde.real())) >= -1e-10);
    // K reproduced from the SLDs.
    for (Eigen::Index j = 0; j < mo.m.rows(); ++j) {
      for (Eigen::Index k = 0; k < mo.m.rows(); ++k) {
        const ComplexMatrix& lj = s.package.l[j].mat();
        const ComplexMatrix& lk = s.package.l[k].mat();
        const double kjk = 0.5 * (mo.s_b.mat() * (lj * lk + lk * lj)).trace().real();
        CHECK(std::abs(kjk - s.package.k(j, k)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("SLD and RLD coincide on commuting models") {
  Rng rng(51);
  for (int t = 0; t < 5; ++t) {
    const StatisticalModel m = commuting_model(rng);
    const BayesMoments mo = build_moments(m);
    const RealMatrix& w = m.weight().constant_matrix();
    CHECK(sld_bound(mo, w).value == doctest::Approx(rld_bound(mo, w).value).epsilon(1e-9));
  }
}

TEST_CASE("one-parameter identities") {
  const StatisticalModel m = random_model({1, 3, 61, 0, false});
  const BayesMoments mo = build_moments(m);
  const SldBound s = sld_bound(mo, RealMatrix::Identity(1, 1));
  const ComplexMatrix& l = s.package.l[0].mat();
  CHECK(s.value == doctest::Approx(mo.m(0, 0) - (mo.s_b.mat() * l * l).trace().real()).epsilon(1e-10));
  CHECK(rld_bound(mo, RealMatrix::Identity(1, 1)).value >= 0.0);
}

TEST_CASE("bounds scale linearly with the weight") {
  const StatisticalModel m = random_model({2, 3, 71, 0, false});
  const BayesMoments mo = build_moments(m);
  const RealMatrix& w = m.weight().constant_matrix();
  for (double c : {0.5, 3.0}) {
    CHECK(sld_bound(mo, c * w).value == doctest::Approx(c * sld_bound(mo, w).value).epsilon(1e-10));
    CHECK(rld_bound(mo, c * w).value == doctest::Approx(c * rld_bound(mo, w).value).epsilon(1e-10));
  }
  const StatisticalModel z = qubit_z_line(4);
  RealMatrix w1 = RealMatrix::Identity(1, 1);
  CHECK(van_tree_bound(z, 2.5 * w1).value == doctest::Approx(2.5 * van_tree_bound(z, w1).value).epsilon(1e-10));
}

TEST_CASE("bounds are unitarily invariant") {
  Rng rng(81);
  const StatisticalModel m = random_model({2, 3, 91, 0, false});
  const BayesMoments mo = build_moments(m);
  const RealMatrix& w = m.weight().constant_matrix();
  const ComplexMatrix u = random_unitary(rng, 3);
  const BayesMoments mu = conjugate(mo, u);
  CHECK(sld_bound(mu, w).value == doctest::Approx(sld_bound(mo, w).value).epsilon(1e-9));
  CHECK(rld_bound(mu, w).value == doctest::Approx(rld_bound(mo, w).value).epsilon(1e-9));
  const StatisticalModel z = qubit_z_line(5);
  const ComplexMatrix v = random_unitary(rng, 2);
  CHECK(van_tree_bound(z.conjugated(v)).value == doctest::Approx(van_tree_bound(z).value).epsilon(1e-9));
}

TEST_CASE("SLD never exceeds RLD ordering-wise by more than tolerance on qubit models") {
  const StatisticalModel m = qubit_xy(0.8, 6);
  const BayesMoments mo = build_moments(m);
  const RealMatrix w = RealMatrix::Identity(2, 2);
  CHECK(std::isfinite(sld_bound(mo, w).value));
  CHECK(std::isfinite(rld_bound(mo, w).value));
}
