#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qvi/hypotheses.hpp"
#include "qvi/problem.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace qvi;

TEST_CASE("constraint projection clamps componentwise") {
  ConstraintSet k = ConstraintSet::all_free(2);
  k.set_lower(0, 0.0);
  k.set_lower(1, 0.0);
  Vec p = k.project({-1.0, 2.0});
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 2.0);
  // Idempotent.
  Vec pp = k.project(p);
  CHECK(pp == p);
  CHECK(k.contains(p, 0.0));
  CHECK_FALSE(k.contains({-1.0, 2.0}, 1e-9));
}

TEST_CASE("pins override bounds in projection") {
  ConstraintSet k = ConstraintSet::all_free(2);
  k.set_pin(0, 5.0);
  Vec p = k.project({1.0, 1.0});
  CHECK(p[0] == 5.0);
  CHECK(p[1] == 1.0);
  CHECK(k.validate()[0] == 5.0);
}

TEST_CASE("projection is non-expansive per dof") {
  Rng rng(5);
  ConstraintSet k = ConstraintSet::all_free(6);
  k.set_lower(0, -0.3);
  k.set_upper(0, 0.4);
  k.set_lower(2, 0.0);
  k.set_upper(4, 1.0);
  k.set_pin(5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    Vec a = rng.vector(6), b = rng.vector(6);
    Vec pa = k.project(a), pb = k.project(b);
    for (int i = 0; i < 6; ++i)
      CHECK(std::fabs(pa[static_cast<std::size_t>(i)] - pb[static_cast<std::size_t>(i)]) <=
            std::fabs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) + 1e-15);
  }
}

TEST_CASE("empty constraint sets are rejected") {
  ConstraintSet k = ConstraintSet::all_free(2);
  k.set_lower(0, 1.0);
  k.set_upper(0, -1.0);
  CHECK_THROWS_AS(k.validate(), Error);

  ConstraintSet pin_out = ConstraintSet::all_free(1);
  pin_out.set_lower(0, 0.0);
  pin_out.set_pin(0, -2.0);
  CHECK_THROWS_AS(pin_out.validate(), Error);
}

TEST_CASE("sparse bound views round the set") {
  ConstraintSet k = ConstraintSet::all_free(4);
  k.set_lower(1, -1.0);
  k.set_upper(2, 3.0);
  k.set_pin(3, 0.25);
  CHECK(k.lower_list() == std::vector<std::pair<int, double>>{{1, -1.0}});
  CHECK(k.upper_list() == std::vector<std::pair<int, double>>{{2, 3.0}});
  CHECK(k.pin_list() == std::vector<std::pair<int, double>>{{3, 0.25}});
  CHECK(k.has_constraints());
  CHECK_FALSE(ConstraintSet::all_free(3).has_constraints());
}

TEST_CASE("nodal terms: one-sided ramp and affine gap") {
  NodalTerm t;
  t.dof = 0;
  t.weight = 2.0;
  t.sign = -1.0;
  t.offset = 0.0;
  t.slope = 3.0;
  t.one_sided = true;

  // u_y = -2 means a gap -u_y = 2; ramp value slope * gap = 6.
  CHECK(t.value(-2.0) == doctest::Approx(6.0));
  CHECK(t.covector(-2.0) == doctest::Approx(2.0 * -1.0 * 6.0));
  CHECK(t.energy(-2.0) == doctest::Approx(0.5 * 2.0 * 3.0 * 4.0));
  // d(covector)/du carries the quadrature weight too.
  CHECK(t.local_slope(-2.0) == doctest::Approx(2.0 * 3.0));
  // Inactive side contributes nothing.
  CHECK(t.value(1.0) == 0.0);
  CHECK(t.covector(1.0) == 0.0);
  CHECK(t.energy(1.0) == 0.0);
  CHECK(t.local_slope(1.0) == 0.0);

  NodalTerm affine = t;
  affine.one_sided = false;
  affine.sign = 1.0;
  affine.offset = 1.0;
  // phi(r) = slope * r on both sides of the offset.
  CHECK(affine.value(0.0) == doctest::Approx(-3.0));
  CHECK(affine.covector(0.0) == doctest::Approx(2.0 * -3.0));
  CHECK(affine.local_slope(0.0) == doctest::Approx(2.0 * 3.0));
}

TEST_CASE("operator covector accumulates linear part and terms") {
  Rng rng(7);
  testsup::BoxOptions opt;
  opt.flavour = 0;
  testsup::BoxInstance inst = testsup::random_box_instance(rng, 5, opt);
  Vec u = rng.vector(5);
  Vec cov = inst.p.a.covector(u);
  Vec expect = spmv(inst.a, u);
  for (const NodalTerm& t : inst.terms)
    expect[static_cast<std::size_t>(t.dof)] += t.covector(u[static_cast<std::size_t>(t.dof)]);
  for (int i = 0; i < 5; ++i)
    CHECK(cov[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("apply_A is the Riesz image of the covector") {
  Rng rng(8);
  testsup::BoxOptions opt;
  opt.flavour = 2;  // non-trivial Gram
  opt.allow_terms = false;
  testsup::BoxInstance inst = testsup::random_box_instance(rng, 6, opt);
  Vec u = rng.vector(6);
  Vec au = apply_A(inst.p.a, inst.p.inner_x, u);
  Vec expect = inst.p.inner_x.riesz(spmv(inst.a, u));
  for (int i = 0; i < 6; ++i)
    CHECK(au[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("friction functional hand values") {
  FrictionFunctional j;
  SUBCASE("zero kind") {
    Vec eta{1.0, -2.0}, v{3.0, 4.0};
    CHECK(eval_j(j, eta, v) == 0.0);
    CHECK_FALSE(j.depends_on_eta());
  }
  SUBCASE("coulomb single node") {
    j.kind = FrictionKind::TrescaCoulomb;
    j.mu = 0.5;
    j.p_slope = 1.0;
    j.nodes.push_back({1, 0, -1.0, 2.0});  // eta_n = -eta[1], weight 2
    j.alpha = j.gamma = 1.0;
    CHECK(j.depends_on_eta());

    Vec eta{0.0, -2.0};  // eta_n = 2
    CHECK(j.bond(eta, j.nodes[0]) == doctest::Approx(0.5 * 2.0 * 2.0));
    Vec v{3.0, 0.0};
    // Unsmoothed |v_t| = 3 against bond 2.
    CHECK(j.eval(eta, v, 0.0) == doctest::Approx(2.0 * 3.0));
    // j(eta, 0) = 0 holds with smoothing too.
    CHECK(j.eval(eta, Vec{0.0, 0.0}) == 0.0);
    // Separated side: p(eta_n) = 0 for eta_n < 0.
    Vec sep{0.0, 1.0};
    CHECK(j.eval(sep, v, 0.0) == 0.0);
    // mu = 0 kills the functional.
    FrictionFunctional none = j;
    none.mu = 0.0;
    CHECK(eval_j(none, eta, v) == 0.0);
    CHECK_FALSE(none.depends_on_eta());
  }
}

TEST_CASE("four-point bound holds on sampled quadruples") {
  GalerkinProblem toy = testsup::contact_toy(0.5);
  Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec e1 = rng.vector(4), e2 = rng.vector(4), v1 = rng.vector(4), v2 = rng.vector(4);
    const double lhs = toy.j.eval(e1, v2, 0.0) - toy.j.eval(e1, v1, 0.0) +
                       toy.j.eval(e2, v1, 0.0) - toy.j.eval(e2, v2, 0.0);
    const double bound = toy.j.alpha * norm2(vsub(e1, e2)) * norm2(vsub(v1, v2));
    worst = std::max(worst, lhs - bound);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("growth bound holds on sampled triples") {
  GalerkinProblem toy = testsup::contact_toy(0.5);
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec eta = rng.vector(4), v1 = rng.vector(4), v2 = rng.vector(4);
    const double lhs = toy.j.eval(eta, v1, 0.0) - toy.j.eval(eta, v2, 0.0);
    const double bound =
        (toy.j.beta + toy.j.gamma * norm2(eta)) * norm2(vsub(v1, v2));
    worst = std::max(worst, lhs - bound);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("problem construction enforces smallness") {
  // alpha >= m must be rejected, but the unchecked path keeps the instance
  // for diagnostics and flags it.
  CHECK_THROWS_AS(testsup::contact_toy(2.5), Error);  // alpha = mu = 2.5 > m = 2
  GalerkinProblem ok = testsup::contact_toy(0.5);
  CHECK(ok.smallness_ok);

  ConstraintSet k = ConstraintSet::all_free(4);
  k.set_lower(1, -0.5);
  k.set_lower(3, -0.5);
  OperatorSpec a;
  a.linear = SparseMat::diagonal({2.0, 2.0, 3.0, 3.0});
  a.m = 2.0;
  a.M = 3.0;
  FrictionFunctional j = ok.j;
  j.mu = 2.5;
  j.alpha = j.gamma = 2.5;
  TraceMap pi;
  pi.pi = SparseMat::identity(4);
  pi.c0 = 1.0;
  GalerkinProblem bad = GalerkinProblem::make_unchecked(
      GramInner(SparseMat::identity(4)), GramInner(SparseMat::identity(4)), std::move(a),
      std::move(k), std::move(j), std::move(pi), Vec{4.0, -3.0, 4.0, -3.0});
  CHECK_FALSE(bad.smallness_ok);
}

TEST_CASE("load covector combines trace image and extra load") {
  Rng rng(17);
  GalerkinProblem p = testsup::identity_problem(3, {1.0, 2.0, 3.0}, ConstraintSet::all_free(3));
  // pi = id and Gy = id: the load covector equals f.
  CHECK(p.load() == Vec{1.0, 2.0, 3.0});
  GalerkinProblem q = p.with_load({0.0, 0.0, -1.0});
  CHECK(q.load() == Vec{0.0, 0.0, -1.0});
  CHECK(p.load() == Vec{1.0, 2.0, 3.0});  // original untouched

  // residual_cov = B(u) - F for the identity operator.
  Vec u = rng.vector(3);
  Vec r = p.residual_cov(u);
  for (int i = 0; i < 3; ++i)
    CHECK(r[static_cast<std::size_t>(i)] ==
          doctest::Approx(u[static_cast<std::size_t>(i)] - p.f[static_cast<std::size_t>(i)]));
}

TEST_CASE("hypothesis validation on the identity instance") {
  GalerkinProblem p = testsup::identity_problem(6, Vec(6, 0.0), ConstraintSet::all_free(6));
  HypothesisReport rep = validate_hypotheses(p, 150, 7);
  CHECK(rep.samples == 150);
  CHECK(rep.m_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.M_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.alpha_hat == 0.0);
  CHECK(rep.gamma_hat == 0.0);
  CHECK(rep.c0_hat <= 1.0 + 1e-9);
  CHECK(rep.c0_hat >= 0.9);  // some sample should come close to the identity bound
  CHECK(rep.consistent);
  CHECK(rep.monotonicity_ok);
  CHECK(rep.lipschitz_ok);
  CHECK(rep.fourpoint_ok);
  CHECK(rep.growth_ok);
  CHECK(rep.trace_ok);
  CHECK(rep.smallness_ok);
  CHECK(rep.summary().find("consistent") != std::string::npos);
}

TEST_CASE("hypothesis validation is deterministic in the seed") {
  GalerkinProblem p = testsup::contact_toy(0.5);
  HypothesisReport a = validate_hypotheses(p, 120, 13);
  HypothesisReport b = validate_hypotheses(p, 120, 13);
  CHECK(a.m_hat == b.m_hat);
  CHECK(a.M_hat == b.M_hat);
  CHECK(a.alpha_hat == b.alpha_hat);
  CHECK(a.gamma_hat == b.gamma_hat);
  CHECK(a.c0_hat == b.c0_hat);
}

TEST_CASE("hypothesis validation flags an inflated friction bound") {
  GalerkinProblem toy = testsup::contact_toy(0.5);

  // Inflate mu and restate the certificates honestly: the sampled constants
  // still match, but the contraction condition m > alpha is gone.
  {
    FrictionFunctional j = toy.j;
    j.mu = 2.5;  // actual four-point constant 2.5 exceeds m = 2
    j.alpha = j.gamma = 2.5;
    OperatorSpec a = toy.a;
    ConstraintSet k = toy.k;
    TraceMap pi = toy.pi;
    GalerkinProblem bad = GalerkinProblem::make_unchecked(toy.inner_x, toy.inner_y, std::move(a),
                                                          std::move(k), std::move(j),
                                                          std::move(pi), toy.f);
    HypothesisReport rep = validate_hypotheses(bad, 150, 3);
    CHECK_FALSE(rep.smallness_ok);
    CHECK(rep.consistent);  // certificates describe the functional truthfully
  }

  // Inflate mu but keep the stale small certificate: the sampled four-point
  // ratio must expose the lie.
  {
    FrictionFunctional j = toy.j;
    j.mu = 2.5;
    OperatorSpec a = toy.a;
    ConstraintSet k = toy.k;
    TraceMap pi = toy.pi;
    GalerkinProblem bad = GalerkinProblem::make_unchecked(toy.inner_x, toy.inner_y, std::move(a),
                                                          std::move(k), std::move(j),
                                                          std::move(pi), toy.f);
    HypothesisReport rep = validate_hypotheses(bad, 150, 3);
    CHECK(rep.alpha_hat > rep.alpha);
    CHECK_FALSE(rep.fourpoint_ok);
    CHECK_FALSE(rep.consistent);
  }
}

TEST_CASE("sampled constants respect the toy certificates") {
  GalerkinProblem toy = testsup::contact_toy(0.5);
  HypothesisReport rep = validate_hypotheses(toy, 200, 29);
  CHECK(rep.m_hat >= 2.0 - 1e-9);
  CHECK(rep.M_hat <= 3.0 + 1e-9);
  CHECK(rep.alpha_hat <= 0.5 + 1e-9);
  CHECK(rep.gamma_hat <= 0.5 + 1e-9);
  CHECK(rep.consistent);
}

TEST_CASE("vi_residual grades candidate solutions") {
  // Identity instance: solution is the projection of f.
  ConstraintSet k = ConstraintSet::all_free(2);
  k.set_lower(0, 0.0);
  k.set_lower(1, 0.0);
  GalerkinProblem p = testsup::identity_problem(2, {-1.0, 2.0}, k);
  Vec u{0.0, 2.0};

  Rng rng(55);
  std::vector<Vec> dirs;
  for (int i = 0; i < 60; ++i) dirs.push_back(rng.vector(2, 2.0));
  CHECK(vi_residual(p, u, dirs) >= -1e-8);
  CHECK(vi_residual(p, u, {u}) == doctest::Approx(0.0));

  // A non-solution sees a strictly negative residual in the right direction.
  Vec wrong{1.5, 0.0};
  CHECK(vi_residual(p, wrong, {u}) < -0.1);
}
