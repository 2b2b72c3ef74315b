#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mrlt/diagnostics.hpp"
#include "mrlt/lt_scheduler.hpp"

using namespace mrlt;

namespace {

Poly P(std::initializer_list<mpq_class> c) { return Poly(std::vector<mpq_class>(c)); }
mpq_class Q(long n, long d) {
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  const Poly a = P({1, 2}), b = P({0, 1, Q(1, 2)});
  CHECK(a + b == P({1, 3, Q(1, 2)}));
  CHECK(a - a == Poly());
  CHECK((a * b) == P({0, 1, Q(5, 2), 1}));
  CHECK(a.times_z(3) == P({0, 3, 6}));
  CHECK(b.rescaled(Q(1, 2)) == P({0, Q(1, 2), Q(1, 8)}));
  CHECK(b.eval(2.0) == doctest::Approx(4.0));
  CHECK(P({1, -1, Q(1, 2)}).str() == "1 - z + 1/2 z^2");
  CHECK(ratio<Poly>(6, 4) == Q(3, 2));
}

TEST_CASE("uniform amplification is the truncated exponential") {
  CHECK(amplification_polynomial(SchemeKind::FV_RK3, Interface::Uniform) ==
        P({1, 1, Q(1, 2), Q(1, 6)}));
  CHECK(amplification_polynomial(SchemeKind::FV_RK2, Interface::Uniform) == P({1, 1, Q(1, 2)}));
  CHECK(amplification_polynomial(SchemeKind::MRLT_NERK3, Interface::Uniform) ==
        P({1, 1, Q(1, 2), Q(1, 6)}));
  // Global steps do not see the interface.
  CHECK(amplification_polynomial(SchemeKind::MR_RK3, Interface::CoarseSide) ==
        P({1, 1, Q(1, 2), Q(1, 6)}));
}

TEST_CASE("interface amplification of MRLT/NERK3") {
  CHECK(amplification_polynomial(SchemeKind::MRLT_NERK3, Interface::FineSide) ==
        P({1, 1, Q(1, 2), Q(1, 12), Q(1, 24)}));
  CHECK(amplification_polynomial(SchemeKind::MRLT_NERK3, Interface::CoarseSide) ==
        P({1, 1, Q(1, 2), Q(1, 8), Q(1, 144), Q(1, 576)}));

  const InterfaceErrors e = interface_error_terms();
  CHECK(e.eps1.is_zero());
  CHECK(e.eps2 == P({0, 0, Q(-1, 4)}));
  CHECK(e.eps3 == P({0, 0, Q(1, 8), Q(-1, 16)}));
  CHECK(e.eps4 == P({0, 0, Q(1, 8), Q(-1, 96), Q(-1, 384)}));
}

TEST_CASE("interface amplification of the second-order schemes") {
  // Fine side: the virtual q* is exact, so the first fine step is plain RK2.
  CHECK(amplification_polynomial(SchemeKind::MRLT_NERK2, Interface::FineSide) ==
        P({1, 1, Q(1, 2)}));
  // Coarse side reads (1 + w)^2 in stage 2: 1 + Z + Z^2/2 + Z^3/8.
  CHECK(amplification_polynomial(SchemeKind::MRLT_NERK2, Interface::CoarseSide) ==
        P({1, 1, Q(1, 2), Q(1, 8)}));
  // Over the cycle NERK2 keeps exp(2w) through w^2; MRLT/RK2 reuses the
  // coarse midpoint value for stage 2 and gets 3/2 instead of 2.
  const Poly nerk = amplification_polynomial(SchemeKind::MRLT_NERK2, Interface::FineCycle);
  const Poly rk2 = amplification_polynomial(SchemeKind::MRLT_RK2, Interface::FineCycle);
  CHECK(nerk.coeff(0) == 1);
  CHECK(nerk.coeff(1) == 2);
  CHECK(nerk.coeff(2) == 2);
  CHECK(rk2.coeff(1) == 2);
  CHECK(rk2.coeff(2) == Q(3, 2));
  const Poly rk3 = amplification_polynomial(SchemeKind::MRLT_NERK3, Interface::FineCycle);
  CHECK(rk3.coeff(2) == 2);
}

TEST_CASE("symbolic and floating-point runs agree") {
  const double w = -0.1;
  for (SchemeKind s : {SchemeKind::MRLT_RK2, SchemeKind::MRLT_NERK2, SchemeKind::MRLT_NERK3}) {
    const auto [fine, coarse] = two_cell_numeric(s, w);
    CHECK(std::fabs(amplification_polynomial(s, Interface::FineSide).eval(w) - fine) <= 1e-12);
    CHECK(std::fabs(amplification_polynomial(s, Interface::CoarseSide).eval(2 * w) - coarse) <=
          1e-12);
  }
  CHECK_THROWS_AS(two_cell_numeric(SchemeKind::MR_RK2, w), ConfigError);
}

TEST_CASE("error norm and convergence order") {
  UniformField a, b;
  a.level = b.level = 2;
  a.cells.assign(4, State{1.0});
  b.cells = a.cells;
  CHECK(l1_error(a, b, 1)[0] == 0.0);
  b.cells[2][0] += 0.4;
  CHECK(l1_error(a, b, 1)[0] == doctest::Approx(0.1));
  UniformField c = a;
  c.level = 3;
  CHECK_THROWS_AS(l1_error(a, c, 1), DomainError);

  const std::vector<double> r = {1.0, 2.0}, h = {1.8, 2.8}, q = {1.9, 2.9};
  CHECK(self_convergence_order(r, h, q) == doctest::Approx(3.0));
  CHECK(self_convergence_order(r, std::vector<double>{1.8, 2.8}, std::vector<double>{1.6, 2.6}) ==
        doctest::Approx(2.0));
  // Affine invariance.
  auto aff = [](std::vector<double> v) {
    for (double& x : v) x = 5.0 * x - 3.0;
    return v;
  };
  CHECK(self_convergence_order(aff(r), aff(h), aff(q)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(self_convergence_order(r, h, h), NumericalError);
}

TEST_CASE("cost and gain") {
  CHECK(cost_mu(1e-2, 30.0, 60.0) == doctest::Approx(5e-3));
  CHECK(gain_lambda(0.3, 0.3) == 1.0);
  // Burgers L=10 table entries (error x 1e-2, CPU % of FV).
  const double mu_mr = cost_mu(1.2890e-2, 14.7, 100.0), mu_nerk = cost_mu(1.0740e-2, 6.7, 100.0);
  CHECK(gain_lambda(mu_mr, mu_nerk) == doctest::Approx(2.63).epsilon(2e-3));
  // Invariant under a common time scale.
  CHECK(gain_lambda(cost_mu(1.0, 3.0, 7.0), cost_mu(2.0, 1.0, 7.0)) ==
        doctest::Approx(gain_lambda(cost_mu(1.0, 30.0, 70.0), cost_mu(2.0, 10.0, 70.0))));
  CHECK_THROWS_AS(cost_mu(1.0, 1.0, 0.0), NumericalError);
  CHECK_THROWS_AS(gain_lambda(1.0, 0.0), NumericalError);
}

TEST_CASE("compression series") {
  AdvectionModel m;
  auto t = m.make_tree(5);
  t->build_uniform(5);
  CompressionSeries s;
  s.record(*t);
  s.record(*t);
  CHECK(s.mean() == 100.0);
  // A constant field coarsens to the root.
  struct Flat : AdvectionModel {
    State point_value(const std::array<double, kMaxDim>&) const override { return State{2.0}; }
  } flat;
  auto f = flat.make_tree(5);
  ThresholdPolicy pol;
  pol.epsilon = 1e-3;
  build_adaptive_grid(*f, [&](const GradedTree& g, const CellIndex& c) { return flat.cell_average(g, c); },
                      pol);
  CompressionSeries one;
  one.record(*f);
  CHECK(one.final() == doctest::Approx(100.0 / 32));
}

TEST_CASE("uniform reconstruction") {
  AdvectionModel m;
  auto t = m.make_tree(6);
  ThresholdPolicy pol;
  pol.epsilon = 1e-4;
  build_adaptive_grid(*t, [&](const GradedTree& g, const CellIndex& c) { return m.cell_average(g, c); },
                      pol);
  const UniformField f = reconstruct_uniform(*t, 6);
  REQUIRE(f.size() == 64);
  UniformSolver fv(m, 6, 2);
  fv.init();
  double d = 0.0;
  for (int i = 0; i < 64; ++i) d = std::max(d, std::fabs(f.cells[i][0] - fv.cells()[i][0]));
  CHECK(d < 1e-3);
  CHECK(d > 0.0);
  // Leaves at the target level are copied exactly.
  for (int h : t->level(6).leaves) {
    CHECK(f.cells[t->cell(h).idx.coords[0]][0] == t->cell(h).q_n[0]);
  }
  // Coarser target: projection of the reconstruction.
  const UniformField c = reconstruct_uniform(*t, 4);
  const UniformField p = project_uniform(project_uniform(f));
  for (int i = 0; i < 16; ++i) CHECK(c.cells[i][0] == doctest::Approx(p.cells[i][0]).epsilon(1e-12));
}
