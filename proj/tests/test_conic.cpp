#include "qbayes/conic.hpp"
#include "qbayes/lmi.hpp"
#include "support.hpp"

using namespace qbayes;
using namespace qbayes::test;

namespace {

SolverOptions mode(bool pc) {
  SolverOptions o;
  o.predictor_corrector = pc;
  return o;
}

// minimize ⟨C, Z⟩ subject to Tr Z = t, Z ⪰ 0 (one block).
ConicProgram trace_program(BlockKind kind, const ComplexMatrix& c, double t) {
  ConicProgram p;
  const std::size_t b = p.add_block(kind, c.rows());
  p.objective().add_matrix(b, c);
  LinearFunctional tr;
  tr.add_matrix(b, ComplexMatrix::Identity(c.rows(), c.rows()));
  p.add_constraint(tr, t);
  return p;
}

void check_certificates(const ConicSolution& s) {
  CHECK(s.optimal());
  CHECK(s.dual_value <= s.primal_value + 1e-9 * std::max(1.0, std::abs(s.primal_value)));
  CHECK(s.relative_gap() <= 1e-8);
  CHECK(s.primal_residual <= 1e-8);
  for (const auto& x : s.blocks) CHECK(min_eigenvalue(HermitianMatrix(x)) >= -1e-8);
}

}  // namespace

TEST_CASE("realify examples") {
  const RealMatrix t = realify(cm({{0, kI}, {-kI, 0}}));
  CHECK(t.rows() == 4);
  const RealVector ev = Eigen::SelfAdjointEigenSolver<RealMatrix>(t).eigenvalues();
  CHECK(max_diff(RealMatrix(ev), RealMatrix(vec({-1, -1, 1, 1}))) < 1e-12);

  RealMatrix h(2, 2);
  h << 1, 2, 2, 5;
  RealMatrix expect = RealMatrix::Zero(4, 4);
  expect.topLeftCorner(2, 2) = h;
  expect.bottomRightCorner(2, 2) = h;
  CHECK(realify(h.cast<cplx>()) == expect);

  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const HermitianMatrix r = random_hermitian(rng, 4);
    const HermitianMatrix s = random_hermitian(rng, 4);
    CHECK(realify(r.mat()).trace() == doctest::Approx(2.0 * r.trace()).epsilon(1e-12));
    const double inner = (realify(r.mat()).transpose() * realify(s.mat())).trace();
    CHECK(inner == doctest::Approx(2.0 * (r.mat() * s.mat()).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("trivial SDP in both solver modes") {
  for (bool pc : {true, false}) {
    const ConicSolution s = solve(trace_program(BlockKind::real_symmetric, cm({{1, 0}, {0, 2}}), 1.0), mode(pc));
    check_certificates(s);
    CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(max_diff(s.blocks[0], cm({{1, 0}, {0, 0}})) < 1e-6);
  }
}

TEST_CASE("complex block picks the smallest eigenvalue") {
  const ComplexMatrix c = cm({{2, kI}, {-kI, 2}});  // eigenvalues 1 and 3
  for (bool pc : {true, false}) {
    const ConicSolution s = solve(trace_program(BlockKind::complex_hermitian, c, 1.0), mode(pc));
    check_certificates(s);
    CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("infeasible probe") {
  for (bool pc : {true, false}) {
    const ConicSolution s = solve(trace_program(BlockKind::real_symmetric, cm({{1, 0}, {0, 2}}), -1.0), mode(pc));
    CHECK(s.status == SolveStatus::infeasible);
  }
}

TEST_CASE("unbounded probe") {
  ConicProgram p;
  const std::size_t b = p.add_block(BlockKind::real_symmetric, 2);
  p.objective().add(b, 0, 0, -1.0);
  LinearFunctional off;
  off.add(b, 0, 1, 1.0);
  p.add_constraint(off, 0.0);
  CHECK(solve(p).status == SolveStatus::unbounded);
}

TEST_CASE("free variables") {
  // minimize u + Z_00 subject to Z_00 − u = 0.5, Z ⪰ 0: u = −0.5 and value −0.5.
  ConicProgram p;
  const std::size_t b = p.add_block(BlockKind::real_symmetric, 1);
  const std::size_t u = p.add_free_vars(1);
  p.objective().add_free(u, 1.0);
  p.objective().add(b, 0, 0, 1.0);
  LinearFunctional c;
  c.add(b, 0, 0, 1.0);
  c.add_free(u, -1.0);
  p.add_constraint(c, 0.5);
  const ConicSolution s = solve(p);
  check_certificates(s);
  CHECK(s.primal_value == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("malformed programs are rejected") {
  ConicProgram p;
  p.add_block(BlockKind::real_symmetric, 2);
  p.objective().add(3, 0, 0, 1.0);
  CHECK_THROWS_AS(p.validate(), Error);
  ConicProgram q;
  const std::size_t b = q.add_block(BlockKind::real_symmetric, 2);
  q.objective().add(b, 0, 1, cplx(0, 1));
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("Holevo lemma closed form examples") {
  const RealMatrix i2 = RealMatrix::Identity(2, 2);
  RealMatrix b(2, 2);
  b << 0, 0.7, -0.7, 0;
  CHECK(holevo_lemma_value(i2, RealMatrix::Zero(2, 2), b) == doctest::Approx(1.4));
  RealMatrix a = vec({1, 2}).asDiagonal();
  RealMatrix b2(2, 2);
  b2 << 0, 0.5, -0.5, 0;
  CHECK(holevo_lemma_value(i2, a, b2) == doctest::Approx(4.0));
  RealMatrix w(2, 2);
  w << 2, 0.3, 0.3, 1;
  CHECK(holevo_lemma_value(w, a, RealMatrix::Zero(2, 2)) == doctest::Approx((w * a).trace()));
  CHECK_THROWS_AS(holevo_lemma_value(RealMatrix::Zero(2, 2), a, b2), Error);
}

TEST_CASE("Holevo lemma SDP pinned case in both modes") {
  const RealMatrix a = vec({1, 2}).asDiagonal();
  RealMatrix b(2, 2);
  b << 0, 0.5, -0.5, 0;
  for (bool pc : {true, false}) {
    const HolevoLemmaSdp s = holevo_lemma_sdp(RealMatrix::Identity(2, 2), a, b, mode(pc));
    CHECK(s.solution.optimal());
    CHECK(s.value == doctest::Approx(4.0).epsilon(1e-7));
  }
}

TEST_CASE("Holevo lemma SDP matches the closed form on random triples") {
  Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + t % 5;
    const RealMatrix w = random_spd(rng, n);
    const RealMatrix a = random_symmetric(rng, n);
    const RealMatrix b = random_antisymmetric(rng, n);
    const double closed = holevo_lemma_value(w, a, b);
    const HolevoLemmaSdp s = holevo_lemma_sdp(w, a, b);
    REQUIRE(s.solution.optimal());
    CHECK(std::abs(s.value - closed) <= 1e-7 * std::max(1.0, std::abs(closed)));
    CHECK(s.solution.dual_value <= s.solution.primal_value + 1e-9 * std::max(1.0, std::abs(s.solution.primal_value)));
  }
}

TEST_CASE("solve is deterministic") {
  Rng rng(5);
  const RealMatrix w = random_spd(rng, 3);
  const RealMatrix a = random_symmetric(rng, 3);
  const RealMatrix b = random_antisymmetric(rng, 3);
  const HolevoLemmaSdp x = holevo_lemma_sdp(w, a, b);
  const HolevoLemmaSdp y = holevo_lemma_sdp(w, a, b);
  CHECK(x.value == y.value);
  CHECK(x.solution.iterations == y.solution.iterations);
  CHECK(x.solution.gap == y.solution.gap);
  CHECK(x.v == y.v);
}

TEST_CASE("iteration cap reports numerical failure") {
  SolverOptions o;
  o.max_iter = 2;
  const ConicSolution s = solve(trace_program(BlockKind::real_symmetric, cm({{1, 0}, {0, 2}}), 1.0), o);
  CHECK(s.status == SolveStatus::numerical_failure);
  CHECK(s.iterations <= 2);
}

TEST_CASE("LMI front end") {
  // minimize y subject to [[y, 1], [1, y]] ⪰ 0: optimum y = 1.
  LmiBuilder lmi;
  const std::size_t y = lmi.add_variables(1);
  const std::size_t blk = lmi.add_lmi(BlockKind::real_symmetric, 2);
  lmi.add_constant(blk, 0, 1, 1.0);
  lmi.add_coefficient(blk, y, 0, 0, 1.0);
  lmi.add_coefficient(blk, y, 1, 1, 1.0);
  lmi.add_cost(y, 1.0);
  const LmiSolution s = lmi.solve();
  CHECK(s.optimal());
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.lower_bound <= s.value + 1e-9);
  CHECK(min_eigenvalue(HermitianMatrix(s.slacks[0])) >= -1e-8);
}

TEST_CASE("program dump lists blocks and constraints") {
  const std::string d = trace_program(BlockKind::complex_hermitian, cm({{1, 0}, {0, 2}}), 1.0).dump();
  CHECK(d.find("block 0 complex 2") != std::string::npos);
  CHECK(d.find("constraints 1") != std::string::npos);
}
