#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mrlt/models.hpp"
#include "mrlt/sync_formulas.hpp"
#include "mrlt/time_schemes.hpp"

using namespace mrlt;

TEST_CASE("compact stages") {
  CHECK(rk_stage1(State{1.0}, State{0.0}, 0.3)[0] == 1.0);
  CHECK(rk_stage1(State{2.0}, State{3.0}, 0.1)[0] == doctest::Approx(2.3));
  CHECK(rk2_stage2(State{0.0}, State{1.0}, State{1.0}, 1.0)[0] == doctest::Approx(1.0));
  CHECK(rk3_stage2(State{0.0}, State{1.0}, State{1.0}, 1.0)[0] == doctest::Approx(0.5));

  // Steady state: every stage returns qn.
  const State qn{0.7, -1.2};
  const State z{};
  CHECK(rk2_stage2(qn, rk_stage1(qn, z, 0.1), z, 0.1) == qn);
  const State qdd = rk3_stage2(qn, rk_stage1(qn, z, 0.1), z, 0.1);
  CHECK(qdd[0] == doctest::Approx(qn[0]));
  CHECK(rk3_stage3(qn, qdd, z, 0.1)[1] == doctest::Approx(qn[1]));

  // Linear test f = lambda q.
  const double lam = -1.7, dt = 0.13, zz = lam * dt;
  const State q0{1.0};
  const State qs = rk_stage1(q0, lam * q0, dt);
  CHECK(qs[0] == doctest::Approx(1 + zz));
  CHECK(rk2_stage2(q0, qs, lam * qs, dt)[0] == doctest::Approx(1 + zz + zz * zz / 2));
  const State q2 = rk3_stage2(q0, qs, lam * qs, dt);
  CHECK(q2[0] == doctest::Approx(1 + zz / 2 + zz * zz / 4));
  CHECK(rk3_stage3(q0, q2, lam * q2, dt)[0] ==
        doctest::Approx(1 + zz + zz * zz / 2 + zz * zz * zz / 6));
}

TEST_CASE("dense output weights") {
  auto b = nerk_beta(1.0);
  CHECK(b.first == 0.5);
  CHECK(b.second == 0.5);
  b = nerk_beta(0.5);
  CHECK(b.first == 3.0 / 8);
  CHECK(b.second == 1.0 / 8);
  b = nerk_beta(0.25);
  CHECK(b.first == 7.0 / 32);
  CHECK(b.second == 1.0 / 32);
  b = nerk_beta(0.75);
  CHECK(b.first == 15.0 / 32);
  CHECK(b.second == 9.0 / 32);
  for (double th : {0.1, 0.33, 0.9}) {
    b = nerk_beta(th);
    CHECK(b.first + b.second == doctest::Approx(th));
  }
  CHECK_THROWS_AS(nerk_beta(0.0), DomainError);
  CHECK_THROWS_AS(nerk_beta(1.5), DomainError);

  const State qn{0.3}, f1{1.1}, f2{-0.4};
  const double dt = 0.2;
  const State qs = rk_stage1(qn, f1, dt);
  CHECK(nerk2_value(qn, f1, f2, dt, 1.0) == rk2_stage2(qn, qs, f2, dt));
  CHECK(nerk2_value(qn, State{}, State{}, dt, 0.37) == qn);

  const double lam = 0.8, zz = lam * dt;
  const State one{1.0};
  const State s1 = rk_stage1(one, lam * one, dt);
  CHECK(nerk2_value(one, lam * one, lam * s1, dt, 0.5)[0] ==
        doctest::Approx(1 + zz / 2 + zz * zz / 8));

  // Two sub-steps on one slot equal the closed form.
  State slot = nerk_substep1(qn, dt * f1, NerkPoint::ThreeQuarter);
  slot = nerk_substep2(slot, dt * f2, NerkPoint::ThreeQuarter);
  CHECK(slot[0] == doctest::Approx(nerk2_value(qn, f1, f2, dt, 0.75)[0]));
}

TEST_CASE("synchronization relations") {
  const State c{2.5, -1.0};
  CHECK(sync::node_extrapolation(c, c) == c);
  CHECK(sync::refresh_extrapolation(c, c) == c);
  CHECK(sync::rk3_three_quarter(c, c, c)[0] == doctest::Approx(c[0]));
  CHECK(sync::rk3_dstar(c, c, c)[0] == doctest::Approx(c[0]));
  CHECK(sync::rk3_end(c, c, c) == c);
  CHECK(sync::post_evolution(c, c, c) == c);

  // Linear in time: q(theta) = theta.
  const State q0{0.0}, q1{1.0}, q14{0.25}, q12{0.5}, q34{0.75};
  CHECK(sync::rk3_three_quarter(q0, q1, q14)[0] == doctest::Approx(0.75));
  CHECK(sync::rk3_dstar(q0, q1, q14)[0] == doctest::Approx(0.5));
  CHECK(sync::rk3_end(q0, q14, q34)[0] == doctest::Approx(1.0));
  CHECK(sync::post_evolution(q0, q1, q12)[0] == doctest::Approx(1.0));
  CHECK(sync::rk3_quarter_from_dstar(q0, q1, State{0.5})[0] == doctest::Approx(0.25));
  CHECK(sync::nerk_reconstruct(State{3.0}, State{-1.0}, State{7.0}, 0.25)[0] == 7.0);
  CHECK(sync::node_extrapolation(State{1.0}, State{2.0})[0] == 3.0);
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("mrlt-nerk2") == SchemeKind::MRLT_NERK2);
  CHECK(parse_scheme("MRLT/NERK3") == SchemeKind::MRLT_NERK3);
  CHECK(scheme_name(SchemeKind::FV_RK3) == "fv-rk3");
  CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
  CHECK(scheme_order(SchemeKind::MR_RK3) == 3);
  CHECK(scheme_is_lt(SchemeKind::MRLT_RK2));
  CHECK_FALSE(scheme_is_adaptive(SchemeKind::FV_RK2));
}

TEST_CASE("cfl time step") {
  CHECK(cfl_timestep(1.0, 1.0 / 512, 0.5, 1, 0.0) == doctest::Approx(0.5 / 512));
  CHECK(cfl_timestep(0.0, 1.0 / 8, 0.5, 1, 1.0) == doctest::Approx(0.5 / 64 / 2));
  CHECK_THROWS_AS(cfl_timestep(0.0, 0.1, 0.5, 1, 0.0), NumericalError);
  CHECK(cfl_timestep(0.0, 0.1, 0.5, 1, 0.0, 1e-3) == 1e-3);

  // Euler at rest: dt = sigma dx / c.
  EulerModel e;
  auto tree = e.make_tree(3);
  tree->build_uniform(3);
  const State rest = euler_from_primitive(1.0, 0.0, 0.0, 1.0, e.gamma);
  for (int h : tree->all_leaves()) tree->cell(h).q_n = rest;
  CHECK(cfl_timestep(e, *tree, 0.5) == doctest::Approx(0.5 * 0.125 / std::sqrt(1.4)));
}
