#include <cstdio>
#include <filesystem>

#include "qbayes/model_io.hpp"
#include "support.hpp"

using namespace qbayes;
using namespace qbayes::test;

namespace {

DensityMatrix bloch(double x, double y, double z) {
  return DensityMatrix(ComplexMatrix(0.5 * (eye(2) + x * pauli::x() + y * pauli::y() + z * pauli::z())));
}

StatisticalModel reweighted(const StatisticalModel& m, const std::vector<double>& w) {
  std::vector<GridPoint> pts = m.points();
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].weight = w[i];
  return StatisticalModel(pts, m.weight());
}

}  // namespace

TEST_CASE("point-mass moments") {
  const RealVector th = vec({0.3, -0.7});
  const DensityMatrix s0 = bloch(0.2, 0.1, 0.4);
  const StatisticalModel m = point_mass(th, s0, RealMatrix::Identity(2, 2));
  const BayesMoments mo = build_moments(m);
  CHECK(max_diff(mo.s_b.mat(), s0.mat()) < 1e-15);
  CHECK(max_diff(mo.d_b[0].mat(), ComplexMatrix(0.3 * s0.mat())) < 1e-15);
  CHECK(max_diff(mo.d_b[1].mat(), ComplexMatrix(-0.7 * s0.mat())) < 1e-15);
  CHECK(max_diff(mo.m, RealMatrix(th * th.transpose())) < 1e-15);
  const ExtendedMoments em = build_extended_moments(m);
  CHECK(em.w_bar == doctest::Approx(th.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("classical binary moments") {
  const StatisticalModel m = classical_binary(1.0, 0.6);
  CHECK(m.size() == 2);
  CHECK(m.n() == 1);
  const BayesMoments mo = build_moments(m);
  CHECK(max_diff(mo.s_b.mat(), ComplexMatrix(0.5 * eye(2))) < 1e-15);
  CHECK(max_diff(mo.d_b[0].mat(), ComplexMatrix(0.3 * pauli::z())) < 1e-15);
  CHECK(mo.m(0, 0) == doctest::Approx(1.0));
  CHECK(mo.w_bar == doctest::Approx(1.0));
  const ExtendedMoments em = build_extended_moments(m);
  CHECK(max_diff(em.s_bar.full(), ComplexMatrix(0.5 * eye(2))) < 1e-15);
  CHECK(max_diff(em.d_bar[0].mat(), ComplexMatrix(0.3 * pauli::z())) < 1e-15);
  CHECK(em.w_bar == doctest::Approx(1.0));
}

TEST_CASE("four-point disk prior") {
  const StatisticalModel m = qubit_xy(0.5, 4);
  CHECK(m.size() == 4);
  const BayesMoments mo = build_moments(m);
  CHECK(mo.theta_bar.norm() < 1e-15);
  CHECK(max_diff(mo.m, RealMatrix(vec({0.125, 0.125}).asDiagonal())) < 1e-15);
}

TEST_CASE("empty grid is rejected") {
  try {
    StatisticalModel m({}, WeightSpec::constant(RealMatrix::Identity(1, 1)));
    (void)build_moments(m);
    FAIL("expected empty_model");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_model);
  }
}

TEST_CASE("model invariants are validated") {
  GridPoint a{RealVector::Constant(1, 1.0), 0.6, bloch(0, 0, 0.5), std::nullopt};
  GridPoint b{RealVector::Constant(1, -1.0), 0.6, bloch(0, 0, -0.5), std::nullopt};
  CHECK_THROWS_AS(StatisticalModel({a, b}, WeightSpec::constant(RealMatrix::Identity(1, 1))), Error);
  b.weight = 0.4;
  CHECK_NOTHROW(StatisticalModel({a, b}, WeightSpec::constant(RealMatrix::Identity(1, 1))));
  CHECK_THROWS_AS(StatisticalModel({a, b}, WeightSpec::constant(-RealMatrix::Identity(1, 1))), Error);
  GridPoint c{RealVector::Constant(2, 0.0), 0.4, bloch(0, 0, 0), std::nullopt};
  CHECK_THROWS_AS(StatisticalModel({a, c}, WeightSpec::constant(RealMatrix::Identity(1, 1))), Error);
  CHECK_THROWS_AS(model_zoo("no_such_model", std::vector<double>{}), Error);
  CHECK_THROWS_AS(classical_binary(1.0, 1.5), Error);
}

TEST_CASE("extended moments reduce to tensor products for constant weight") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const StatisticalModel m = random_model({2, 3, seed, 0, false});
    const BayesMoments mo = build_moments(m);
    const ExtendedMoments em = build_extended_moments(m);
    const RealMatrix& w = m.weight().constant_matrix();
    CHECK(max_diff(em.s_bar.full(), kron(w.cast<cplx>(), mo.s_b.mat())) < 1e-12);
    CHECK(em.w_bar == doctest::Approx((w * mo.m).trace()).epsilon(1e-12));
    for (Eigen::Index j = 0; j < 2; ++j) {
      ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
      for (Eigen::Index k = 0; k < 2; ++k) expect += w(j, k) * mo.d_b[k].mat();
      CHECK(max_diff(em.d_bar[j].mat(), expect) < 1e-12);
    }
  }
}

TEST_CASE("S_bar is the prior average of the per-point operators") {
  for (bool per_point : {false, true}) {
    const StatisticalModel m = random_model({3, 2, 21, 5, per_point});
    const ExtendedMoments em = build_extended_moments(m);
    REQUIRE(em.per_point_s.size() == m.size());
    ExtendedOperator sum(3, 2);
    for (std::size_t i = 0; i < m.size(); ++i) sum += m.point(i).weight * em.per_point_s[i];
    CHECK(max_diff(sum.full(), em.s_bar.full()) < 1e-12);
    CHECK(em.s_bar.is_hermitian());
    CHECK(em.s_bar.is_block_symmetric());
    CHECK(min_eigenvalue(HermitianMatrix(em.s_bar.full())) > -1e-10);
  }
}

TEST_CASE("moments are affine in the prior") {
  const StatisticalModel base = random_model({2, 2, 31, 5, false});
  const std::vector<double> p{0.1, 0.2, 0.3, 0.15, 0.25};
  const std::vector<double> q{0.4, 0.1, 0.1, 0.3, 0.1};
  std::vector<double> mix(5);
  for (int i = 0; i < 5; ++i) mix[i] = 0.3 * p[i] + 0.7 * q[i];
  const BayesMoments a = build_moments(reweighted(base, p));
  const BayesMoments b = build_moments(reweighted(base, q));
  const BayesMoments c = build_moments(reweighted(base, mix));
  CHECK(max_diff(c.s_b.mat(), ComplexMatrix(0.3 * a.s_b.mat() + 0.7 * b.s_b.mat())) < 1e-12);
  for (int j = 0; j < 2; ++j) CHECK(max_diff(c.d_b[j].mat(), ComplexMatrix(0.3 * a.d_b[j].mat() + 0.7 * b.d_b[j].mat())) < 1e-12);
  CHECK(max_diff(c.m, RealMatrix(0.3 * a.m + 0.7 * b.m)) < 1e-12);
  CHECK(c.w_bar == doctest::Approx(0.3 * a.w_bar + 0.7 * b.w_bar).epsilon(1e-12));
}

TEST_CASE("prior covariance is PSD on every zoo model") {
  const std::vector<StatisticalModel> models{classical_binary(1.0, 0.6), correlated_pair(1.0, 0.6), qubit_xy(0.8, 6, 2),
                                             qubit_z_line(5), random_model({3, 2, 4, 0, false}),
                                             random_model({2, 3, 5, 6, true})};
  for (const auto& m : models) {
    const BayesMoments mo = build_moments(m);
    CHECK(min_eigenvalue(RealMatrix(mo.m - mo.theta_bar * mo.theta_bar.transpose())) >= -1e-10);
  }
}

TEST_CASE("unitary covariance of moments") {
  Rng rng(41);
  const StatisticalModel m = random_model({2, 3, 9, 0, false});
  const ComplexMatrix u = random_unitary(rng, 3);
  const BayesMoments a = build_moments(m);
  const BayesMoments b = build_moments(m.conjugated(u));
  CHECK(max_diff(b.s_b.mat(), ComplexMatrix(u * a.s_b.mat() * u.adjoint())) < 1e-12);
  for (int j = 0; j < 2; ++j) CHECK(max_diff(b.d_b[j].mat(), ComplexMatrix(u * a.d_b[j].mat() * u.adjoint())) < 1e-12);
  CHECK(max_diff(a.m, b.m) == 0.0);
  CHECK(a.w_bar == b.w_bar);
}

TEST_CASE("random_model is deterministic per seed") {
  const std::string a = dump_model(random_model({2, 3, 77, 0, true}));
  const std::string b = dump_model(random_model({2, 3, 77, 0, true}));
  const std::string c = dump_model(random_model({2, 3, 78, 0, true}));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("zoo dispatch matches the direct generators") {
  const std::vector<double> p{1.0, 0.6};
  CHECK(dump_model(model_zoo("classical_binary", p)) == dump_model(classical_binary(1.0, 0.6)));
  const std::vector<double> q{0.5, 4};
  CHECK(dump_model(model_zoo("qubit_xy", q)) == dump_model(qubit_xy(0.5, 4)));
  CHECK(zoo_names().size() >= 5);
}

TEST_CASE("JSON round trip is bit-exact") {
  for (const auto& m : {correlated_pair(1.0, 0.6), qubit_z_line(3), random_model({3, 2, 8, 0, true})}) {
    const std::string text = dump_model(m);
    const StatisticalModel back = parse_model(text);
    CHECK(dump_model(back) == text);
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(back.point(i).state.mat() == m.point(i).state.mat());
      CHECK(back.point(i).theta == m.point(i).theta);
      CHECK(back.point(i).weight == m.point(i).weight);
    }
  }
  const auto path = std::filesystem::temp_directory_path() / "qbayes_model_roundtrip.json";
  save_model(qubit_z_line(3), path);
  CHECK(load_model(path).has_derivatives());
  std::filesystem::remove(path);
}

TEST_CASE("malformed JSON reports a location") {
  try {
    parse_model("{\n  \"n\": 1,\n  \"d\": 2,\n  oops }");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model(R"({"n": 1, "d": 2, "weight": {"constant": [[1]]}, "points": []})"), Error);
}

TEST_CASE("sha256 matches a known digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
