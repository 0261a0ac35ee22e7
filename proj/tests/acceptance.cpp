// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qbayes/closedform.hpp"
#include "qbayes/conic.hpp"
#include "qbayes/rng.hpp"
#include "qbayes/sdpbounds.hpp"
#include "qbayes/verify.hpp"

using namespace qbayes;

namespace {

// Every conic solution produced during the run, for the conformance criterion.
std::vector<ConicSolution> g_solves;

double nh_of(const StatisticalModel& m, const SolverOptions& o = {}) {
  NhSolution s = nagaoka_hayashi_bound(build_extended_moments(m), o);
  g_solves.push_back(s.diagnostics);
  return s.value;
}

double holevo_of(const ExtendedMoments& em, HolevoForm f = HolevoForm::automatic, const SolverOptions& o = {}) {
  HolevoSolution s = holevo_type_bound(em, f, o);
  g_solves.push_back(s.diagnostics);
  return s.value;
}

double holevo_of(const StatisticalModel& m, HolevoForm f = HolevoForm::automatic) {
  return holevo_of(build_extended_moments(m), f);
}

double sld_of(const StatisticalModel& m) { return sld_bound(build_moments(m), m.weight().constant_matrix()).value; }
double rld_of(const StatisticalModel& m) { return rld_bound(build_moments(m), m.weight().constant_matrix()).value; }

struct Tracker {
  bool ok = true;
  double worst = 0.0;
  std::string first_failure;

  void check(bool cond, double excess, const std::string& what) {
    worst = std::max(worst, excess);
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
};

int g_failed = 0;

RealVector vec(std::initializer_list<double> v) {
  return Eigen::Map<const RealVector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

void report(int id, const std::string& title, const std::function<std::string(Tracker&)>& body) {
  Tracker t;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    detail = body(t);
  } catch (const std::exception& e) {
    t.ok = false;
    t.first_failure = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!t.ok) ++g_failed;
  std::printf("criterion %d: %s  %s (%s; %.1fs)\n", id, t.ok ? "PASS" : "FAIL", title.c_str(),
              t.ok ? detail.c_str() : t.first_failure.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

StatisticalModel random_point_mass(Rng& rng) {
  const int n = rng.uniform_int(1, 3);
  const int d = rng.uniform_int(2, 4);
  RealVector theta(n);
  for (int j = 0; j < n; ++j) theta(j) = rng.uniform(-1.0, 1.0);
  return point_mass(theta, random_state(rng, d, 0.2), RealMatrix::Identity(n, n));
}

}  // namespace

int main() {
  report(1, "point-mass collapse", [](Tracker& t) {
    Rng rng(101);
    for (int k = 0; k < 10; ++k) {
      const StatisticalModel m = random_point_mass(rng);
      const std::string tag = "instance " + std::to_string(k);
      for (double v : {sld_of(m), rld_of(m), holevo_of(m), nh_of(m)}) t.check(std::abs(v) <= 1e-7, std::abs(v), tag + " bound " + fmt("%.3g", v));
      const double s = seesaw(m, 0, 20, 1).best.risk;
      t.check(s <= 1e-9, s, tag + " seesaw " + fmt("%.3g", s));
    }
    return fmt("10 instances, largest |value| %.2e", t.worst);
  });

  report(2, "Personick tightness for one parameter", [](Tracker& t) {
    std::vector<StatisticalModel> models{classical_binary(1.0, 0.6)};
    for (std::uint64_t s = 1; s <= 20; ++s) models.push_back(random_model({1, 2 + static_cast<int>(s % 3), 200 + s, 0, false}));
    double cb_value = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const StatisticalModel& m = models[i];
      const BayesMoments mo = build_moments(m);
      const RealMatrix& w = m.weight().constant_matrix();
      const SldBound sb = sld_bound(mo, w);
      const double target = w(0, 0) * (mo.m(0, 0) - sb.package.k(0, 0));
      if (i == 0) cb_value = target;
      const std::string tag = "model " + std::to_string(i);
      for (double v : {sb.value, nh_of(m), holevo_of(m)}) t.check(std::abs(v - target) <= 1e-6, std::abs(v - target), tag);
      const double pr = personick_optimal_measurement(mo, w(0, 0)).risk;
      t.check(std::abs(pr - target) <= 1e-9, std::abs(pr - target), tag + " Personick risk");
    }
    t.check(std::abs(cb_value - 0.64) <= 1e-6, 0.0, "classical binary value " + fmt("%.9f", cb_value));
    return fmt("21 models, classical binary %.6f, largest deviation %.2e", cb_value, t.worst);
  });

  report(3, "correlated pair at 1.28", [](Tracker& t) {
    const StatisticalModel m = correlated_pair(1.0, 0.6);
    const double sld = sld_of(m);
    const double nh = nh_of(m);
    const double ss = seesaw(m, 2, 50, 1).best.risk;
    t.check(std::abs(sld - 1.28) <= 1e-5, 0.0, fmt("C_SLD %.9f", sld));
    t.check(std::abs(nh - 1.28) <= 1e-5, 0.0, fmt("C_NH %.9f", nh));
    t.check(ss <= 1.28 + 1e-5, 0.0, fmt("seesaw %.9f", ss));
    return fmt("C_SLD %.9f, C_NH %.9f", sld, nh) + fmt(", seesaw %.9f", ss);
  });

  report(4, "ordering chain on 50 random models", [](Tracker& t) {
    double smallest = 1e300;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const StatisticalModel m = random_model({2 + static_cast<int>(s % 2), 2 + static_cast<int>((s / 2) % 2), 400 + s, 0, false});
      AuditOptions o;
      o.seesaw_iters = 50;
      const AuditRecord a = ordering_audit(m, o);
      const double mm = a.min_margin();
      smallest = std::min(smallest, mm);
      t.check(a.passed(1e-6) && a.errors.empty(), -mm, "model seed " + std::to_string(400 + s) + fmt(" margin %.3e", mm));
    }
    return fmt("smallest margin %.3e", smallest);
  });

  report(5, "operator-inequality lemma equivalence and chain", [](Tracker& t) {
    Rng rng(505);
    double worst_eq = 0.0, worst_chain = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index d = 1 + k % 4;
      const std::vector<TensorTerm> single{{1.0, random_spd(rng, 2), random_state(rng, d, 0.2)}};
      const ComplexMatrix g = [&] {
        ComplexMatrix r(2 * d, 2 * d);
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = cplx(rng.normal(), rng.normal());
        return r;
      }();
      const ExtendedOperator x(2, d, 0.5 * (g + g.adjoint()));
      const double f = appendix_f(AppendixKind::f_sdp, single, x);
      const double f1 = appendix_f(AppendixKind::f1, single, x);
      const double dev = std::abs(f - f1) / std::max(1.0, std::abs(f1));
      worst_eq = std::max(worst_eq, dev);
      t.check(dev <= 1e-6, dev, "instance " + std::to_string(k) + fmt(": f_sdp %.9f vs f1 %.9f", f, f1));
      const double f3 = appendix_f(AppendixKind::f3, single, x);
      const double f4 = appendix_f(AppendixKind::f4, single, x);
      const double f5 = appendix_f(AppendixKind::f5, single, x);
      const double viol = std::max({f3 - f, f4 - f3, f5 - f});
      worst_chain = std::max(worst_chain, viol);
      t.check(viol <= 1e-7, viol, "instance " + std::to_string(k) + fmt(": chain violated by %.3e", viol));
    }
    return fmt("largest |f_sdp - f1| %.2e, largest chain violation %.2e", worst_eq, worst_chain);
  });

  report(6, "Holevo lemma identity", [](Tracker& t) {
    const RealMatrix a = vec({1, 2}).asDiagonal();
    RealMatrix b(2, 2);
    b << 0, 0.5, -0.5, 0;
    const HolevoLemmaSdp pinned = holevo_lemma_sdp(RealMatrix::Identity(2, 2), a, b);
    g_solves.push_back(pinned.solution);
    t.check(std::abs(pinned.value - 4.0) <= 1e-7, 0.0, fmt("pinned SDP %.9f", pinned.value));
    t.check(std::abs(holevo_lemma_value(RealMatrix::Identity(2, 2), a, b) - 4.0) <= 1e-12, 0.0, "pinned closed form");
    Rng rng(606);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Eigen::Index n = 1 + k % 5;
      const RealMatrix w = random_spd(rng, n);
      RealMatrix g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
      const RealMatrix sa = 0.5 * (g + g.transpose());
      g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
      const RealMatrix sb = 0.5 * (g - g.transpose());
      const double closed = holevo_lemma_value(w, sa, sb);
      const HolevoLemmaSdp s = holevo_lemma_sdp(w, sa, sb);
      g_solves.push_back(s.solution);
      const double dev = std::abs(s.value - closed) / std::max(1.0, std::abs(closed));
      worst = std::max(worst, dev);
      t.check(dev <= 1e-7, dev, "triple " + std::to_string(k) + fmt(": SDP %.9f vs closed %.9f", s.value, closed));
    }
    return fmt("pinned %.9f, largest relative deviation %.2e", pinned.value, worst);
  });

  report(7, "RLD fixture", [](Tracker& t) {
    BayesMoments mo;
    mo.s_b = DensityMatrix(ComplexMatrix(vec({0.75, 0.25}).cast<cplx>().asDiagonal()));
    mo.d_b = {HermitianMatrix(ComplexMatrix(0.1 * pauli::x())), HermitianMatrix(ComplexMatrix(0.1 * pauli::y()))};
    mo.m = 0.1 * RealMatrix::Identity(2, 2);
    mo.theta_bar = RealVector::Zero(2);
    mo.w_bar = 0.2;
    const RealMatrix w = RealMatrix::Identity(2, 2);
    const double sld = sld_bound(mo, w).value;
    const double rld = rld_bound(mo, w).value;
    const ExtendedMoments em = extended_from_moments(mo, w);
    const double h = holevo_of(em);
    const NhSolution nh = nagaoka_hayashi_bound(em);
    g_solves.push_back(nh.diagnostics);
    t.check(std::abs(sld - 0.12) <= 1e-6, 0.0, fmt("C_SLD %.9f", sld));
    t.check(std::abs(rld - 0.146667) <= 1e-6, 0.0, fmt("C_RLD %.9f", rld));
    t.check(h >= 0.146667 - 1e-6, 0.0, fmt("C_H %.9f", h));
    t.check(nh.value >= 0.146667 - 1e-6, 0.0, fmt("C_NH %.9f", nh.value));
    return fmt("C_SLD %.6f, C_RLD %.6f", sld, rld) + fmt(", C_H %.6f, C_NH %.6f", h, nh.value);
  });

  report(8, "per-point and collapsed Holevo forms agree", [](Tracker& t) {
    double worst = 0.0;
    int disagree = 0;
    std::string example;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const StatisticalModel m = random_model({2 + static_cast<int>(s % 2), 2 + static_cast<int>((s / 2) % 2), 800 + s, 0, false});
      const ExtendedMoments em = build_extended_moments(m);
      const double pp = holevo_of(em, HolevoForm::per_point);
      const double co = holevo_of(em, HolevoForm::collapsed);
      const double dev = std::abs(pp - co);
      if (dev > worst) {
        worst = dev;
        example = "seed " + std::to_string(800 + s) + fmt(": per-point %.9f vs collapsed %.9f", pp, co);
      }
      if (dev > 1e-7) ++disagree;
    }
    t.check(disagree == 0, worst,
            std::to_string(disagree) + "/20 models differ by more than 1e-7, largest at " + example);
    return fmt("largest difference %.2e", worst);
  });

  report(9, "invariance under weight scaling, unitaries and grid permutation", [](Tracker& t) {
    Rng rng(909);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 6; ++s) {
      const StatisticalModel m = random_model({2 + static_cast<int>(s % 2), 2 + static_cast<int>((s / 2) % 2), 900 + s, 5, false});
      const auto values = [](const StatisticalModel& x) {
        return std::vector<double>{sld_of(x), rld_of(x), holevo_of(x), holevo_of(x, HolevoForm::per_point), nh_of(x)};
      };
      const std::vector<double> base = values(m);
      const double c = 0.5 + 2.0 * rng.uniform();
      const std::vector<std::size_t> order{4, 2, 0, 3, 1};
      const std::vector<std::pair<std::string, std::vector<double>>> variants{
          {"scaled", values(m.with_weight(WeightSpec::constant(c * m.weight().constant_matrix())))},
          {"conjugated", values(m.conjugated(random_unitary(rng, m.d())))},
          {"permuted", values(m.permuted(order))}};
      for (const auto& [name, v] : variants) {
        for (std::size_t i = 0; i < base.size(); ++i) {
          const double expect = name == "scaled" ? c * base[i] : base[i];
          const double dev = std::abs(v[i] - expect) / std::max(1.0, std::abs(expect));
          worst = std::max(worst, dev);
          t.check(dev <= 1e-7, dev, name + " model " + std::to_string(900 + s) + fmt(" bound %g deviates %.3e", double(i), dev));
        }
      }
    }
    return fmt("6 models x 5 bounds x 3 transforms, largest relative change %.2e", worst);
  });

  report(10, "solver conformance", [](Tracker& t) {
    // Re-solve a sample in the pure path-following mode as well.
    SolverOptions pure;
    pure.predictor_corrector = false;
    for (const StatisticalModel& m : {classical_binary(1.0, 0.6), correlated_pair(1.0, 0.6), qubit_xy(0.5, 4),
                                      random_model({2, 2, 1001, 0, false}), random_model({3, 2, 1002, 0, false})}) {
      nh_of(m, pure);
      holevo_of(build_extended_moments(m), HolevoForm::per_point, pure);
    }
    std::size_t optimal = 0;
    for (const auto& s : g_solves) {
      t.check(s.optimal(), 0.0, std::string("solve reported ") + std::string(to_string(s.status)));
      if (!s.optimal()) continue;
      ++optimal;
      t.check(s.relative_gap() <= 1e-8, s.relative_gap(), fmt("relative gap %.3e", s.relative_gap()));
      t.check(s.primal_residual <= 1e-8, s.primal_residual, fmt("primal residual %.3e", s.primal_residual));
    }
    for (bool pc : {true, false}) {
      ConicProgram p;
      const std::size_t b = p.add_block(BlockKind::real_symmetric, 2);
      p.objective().add(b, 0, 0, 1.0);
      p.objective().add(b, 1, 1, 2.0);
      LinearFunctional tr;
      tr.add(b, 0, 0, 1.0);
      tr.add(b, 1, 1, 1.0);
      p.add_constraint(tr, -1.0);
      SolverOptions o;
      o.predictor_corrector = pc;
      const ConicSolution s = solve(p, o);
      t.check(s.status == SolveStatus::infeasible, 0.0,
              std::string("infeasible probe reported ") + std::string(to_string(s.status)) + (pc ? " (predictor-corrector)" : " (pure)"));
    }
    std::ostringstream os;
    os << optimal << " optimal solves, largest gap/residual " << fmt("%.2e", t.worst) << ", infeasible probe flagged in both modes";
    return os.str();
  });

  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
