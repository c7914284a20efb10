#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "qvi/fem_heat.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace qvi;

namespace {

HeatData constant_data(const Mesh2D& mesh, double source, double b, double q) {
  return sample_heat_data(
      mesh, [=](double, double) { return source; }, [=](double, double) { return b; },
      [=](double, double) { return q; });
}

// Dense node-by-node assembly of the full stiffness, nothing eliminated.
testsup::Dense full_stiffness(const Mesh2D& mesh) {
  testsup::Dense k(mesh.node_count(), Vec(mesh.node_count(), 0.0));
  for (std::size_t t = 0; t < mesh.tri_count(); ++t) {
    const auto& tri = mesh.tris[t];
    auto ke = p1_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k[tri[i]][tri[j]] += ke[i][j];
  }
  return k;
}

}  // namespace

TEST_CASE("element stiffness on the reference triangle") {
  auto k = p1_stiffness({0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0});
  const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(k[i][j] == doctest::Approx(expect[i][j]).epsilon(1e-14));
}

TEST_CASE("element matrices match symbolic integration on skewed triangles") {
  const std::array<double, 2> tris[3][3] = {
      {{0.2, 0.1}, {1.3, 0.4}, {0.5, 1.7}},
      {{-1.0, 0.0}, {2.0, -0.5}, {0.3, 2.2}},
      {{0.0, 0.0}, {0.01, 0.0}, {0.0, 3.0}},  // badly stretched
  };
  for (const auto& t : tris) {
    auto ks = p1_stiffness(t[0], t[1], t[2]);
    auto ko = testsup::p1_stiffness_oracle(t[0], t[1], t[2]);
    auto ms = p1_mass(t[0], t[1], t[2]);
    auto mo = testsup::p1_mass_oracle(t[0], t[1], t[2]);
    double row_sum_bound = 0.0;
    for (int i = 0; i < 3; ++i) {
      double row = 0.0;
      for (int j = 0; j < 3; ++j) {
        CHECK(ks[i][j] == doctest::Approx(ko[i][j]).epsilon(1e-12));
        CHECK(ms[i][j] == doctest::Approx(mo[i][j]).epsilon(1e-12));
        row += ks[i][j];
        row_sum_bound = std::max(row_sum_bound, std::fabs(ks[i][j]));
      }
      // Constants lie in the stiffness kernel element by element.
      CHECK(std::fabs(row) <= 1e-13 * (1.0 + row_sum_bound));
    }
  }
}

TEST_CASE("assembled stiffness equals the dense restriction") {
  Mesh2D mesh = unit_square(4, 4);
  HeatAssembly ha = assemble_heat(mesh, constant_data(mesh, 1.0, 0.5, 0.0));
  testsup::Dense full = full_stiffness(mesh);

  // Full rows sum to zero: constants are flux-free.
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    double row = 0.0;
    for (double v : full[i]) row += v;
    CHECK(std::fabs(row) <= 1e-13);
  }

  REQUIRE(ha.node_of_free.size() == ha.stiffness.rows);
  for (std::size_t i = 0; i < ha.node_of_free.size(); ++i) {
    Vec e(ha.stiffness.cols, 0.0);
    e[i] = 1.0;
    Vec col = spmv(ha.stiffness, e);
    for (std::size_t r = 0; r < ha.node_of_free.size(); ++r)
      CHECK(col[r] ==
            doctest::Approx(full[ha.node_of_free[r]][ha.node_of_free[i]]).epsilon(1e-13));
  }

  // Eliminated nodes are exactly the Dirichlet part.
  std::vector<std::size_t> part1 = mesh.boundary_nodes(1);
  for (std::size_t n : part1) CHECK(ha.free_of_node[n] == -1);
  CHECK(ha.node_of_free.size() + part1.size() == mesh.node_count());
}

TEST_CASE("zero data solves to zero") {
  Mesh2D mesh = unit_square(4, 2);
  HeatAssembly ha = assemble_heat(mesh, constant_data(mesh, 0.0, 0.0, 0.0));
  Solution s = solve_qvi(ha.problem, {});
  REQUIRE(s.converged);
  CHECK(norm2(s.u) == 0.0);
  CHECK(complementarity_check(ha.problem, s.u) == 0.0);
}

TEST_CASE("interior positive solution matches the unconstrained oracle") {
  Mesh2D mesh = unit_square(4, 2);
  HeatAssembly ha = assemble_heat(mesh, constant_data(mesh, 3.0, 0.5, 0.0));
  Solution s = solve_qvi(ha.problem, {});
  REQUIRE(s.converged);
  auto oracle = testsup::box_vi_oracle(ha.stiffness, ha.problem.a.boundary, ha.problem.load(),
                                       ha.problem.k, 1e-9);
  REQUIRE(oracle.has_value());
  CHECK(ha.problem.inner_x.dist(s.u, *oracle) <= 1e-8);
  // Positive source keeps the temperature strictly positive away from the
  // cold wall, so the unilateral bound is slack everywhere.
  double min_free = 1e9;
  for (double v : s.u) min_free = std::min(min_free, v);
  CHECK(min_free > 0.0);
  CHECK(complementarity_check(ha.problem, s.u) <= 1e-9);
}

TEST_CASE("complementarity defect hand values") {
  // Identity operator: r = u - f. Inactive box -> defect is max |r_i|.
  ConstraintSet k = ConstraintSet::all_free(3);
  for (int i = 0; i < 3; ++i) k.set_lower(i, -5.0);
  GalerkinProblem p = testsup::identity_problem(3, {1.0, -2.0, 0.5}, k);
  CHECK(complementarity_check(p, {1.0, -2.0, 0.5}) <= 1e-15);
  CHECK(complementarity_check(p, {2.0, -2.0, 0.5}) == doctest::Approx(1.0));
  CHECK(complementarity_check(p, {1.0, -2.0, 0.75}) == doctest::Approx(0.25));

  // Negative source with zero prescribed temperature: u = 0 is the solution
  // (the bound carries the residual) and the defect vanishes.
  Mesh2D mesh = unit_square(4, 2);
  HeatAssembly ha = assemble_heat(mesh, constant_data(mesh, -2.0, 0.0, 0.1));
  Solution s = solve_qvi(ha.problem, {});
  REQUIRE(s.converged);
  for (double v : s.u) CHECK(v == 0.0);
  CHECK(complementarity_check(ha.problem, s.u) <= 1e-12);

  // Pinned dof mismatch is reported through the defect.
  Vec bad = s.u;
  REQUIRE(!ha.gamma2_dofs.empty());
  bad[ha.gamma2_dofs[0]] += 0.3;
  CHECK(complementarity_check(ha.problem, bad) >= 0.3 - 1e-12);
}

TEST_CASE("prescribed-temperature gap measures the part-2 mismatch") {
  HeatAssembly ha = testsup::heat_strip();
  Solution ref = solve_qvi(ha.problem, {});
  REQUIRE(ref.converged);
  CHECK(ha.gamma2_gap(ref.u) == 0.0);  // pins hold exactly

  double wsum = 0.0;
  for (double w : ha.gamma2_weights) wsum += w;
  Vec shifted = ref.u;
  for (int d : ha.gamma2_dofs) shifted[d] += 0.7;
  CHECK(ha.gamma2_gap(shifted) == doctest::Approx(0.7 * std::sqrt(wsum)).epsilon(1e-12));
}

TEST_CASE("robin exchange limit recovers the prescribed temperature") {
  Mesh2D mesh = unit_square(8, 8);
  HeatData data = constant_data(mesh, 1.0, 1.0, 0.0);
  PenaltySchedule sched;
  sched.lambda0 = 0.5;
  sched.ratio = 0.25;
  sched.count = 4;
  SweepResult sweep = robin_limit_experiment(mesh, data, sched, {});
  REQUIRE(sweep.table.rows.size() == 4);
  REQUIRE(sweep.table.extra_name == "gamma2_gap");
  for (std::size_t i = 0; i < sweep.table.rows.size(); ++i) {
    REQUIRE(sweep.table.rows[i].ok);
    if (i > 0) {
      CHECK(sweep.table.rows[i].extra <= 1.05 * sweep.table.rows[i - 1].extra + 1e-12);
      CHECK(sweep.table.rows[i].distance_x <=
            1.05 * sweep.table.rows[i - 1].distance_x + 1e-12);
    }
  }
  CHECK(sweep.table.rows.back().extra <= 0.05 * sweep.table.rows.front().extra);
}

TEST_CASE("refinement changes the solution mildly at shared nodes") {
  auto solve_on = [](std::size_t n) {
    Mesh2D mesh = unit_square(n, n);
    HeatAssembly ha = assemble_heat(mesh, constant_data(mesh, 2.0, 0.5, 0.1));
    Solution s = solve_qvi(ha.problem, {});
    REQUIRE(s.converged);
    std::map<std::pair<long, long>, double> by_coord;
    for (std::size_t d = 0; d < ha.node_of_free.size(); ++d) {
      const auto& xy = mesh.nodes[ha.node_of_free[d]];
      by_coord[{std::lround(xy[0] * 1e6), std::lround(xy[1] * 1e6)}] = s.u[d];
    }
    return by_coord;
  };
  auto coarse = solve_on(8);
  auto fine = solve_on(16);
  double sup = 0.0, diff = 0.0;
  std::size_t shared = 0;
  for (const auto& [key, value] : coarse) {
    auto it = fine.find(key);
    if (it == fine.end()) continue;
    ++shared;
    sup = std::max(sup, std::fabs(it->second));
    diff = std::max(diff, std::fabs(it->second - value));
  }
  REQUIRE(shared == coarse.size());  // every coarse node persists
  CHECK(diff <= 0.10 * sup);
}

TEST_CASE("certified constants hold on samples") {
  HeatAssembly ha = testsup::heat_strip();
  CHECK(ha.problem.a.m == doctest::Approx(1.0 / (1.0 + ha.poincare)));
  CHECK(ha.problem.a.M == 1.0);
  CHECK(ha.problem.c0 == 1.0);

  // The Poincare certificate: ||v||_L2^2 <= C_P ||grad v||_L2^2 on free dofs.
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    Vec v = rng.vector(static_cast<int>(ha.node_of_free.size()), 2.0);
    double l2 = bilinear(ha.mass, v, v);
    double h1s = bilinear(ha.stiffness, v, v);
    CHECK(l2 <= ha.poincare * h1s * (1.0 + 1e-9));
  }

  // Both Grams certify as SPD.
  CHECK_NOTHROW(GramInner(ha.stiffness));
  CHECK_NOTHROW(GramInner(ha.mass));
}

TEST_CASE("assembly is bitwise deterministic") {
  Mesh2D mesh = unit_square(5, 3);
  HeatData data = constant_data(mesh, 1.5, 0.25, -0.3);
  HeatAssembly a = assemble_heat(mesh, data);
  HeatAssembly b = assemble_heat(mesh, data);
  CHECK(a.stiffness.row_ptr == b.stiffness.row_ptr);
  CHECK(a.stiffness.col_idx == b.stiffness.col_idx);
  CHECK(a.stiffness.vals == b.stiffness.vals);
  CHECK(a.problem.f == b.problem.f);
  CHECK(a.problem.extra_load == b.problem.extra_load);
  CHECK(a.penalty.g.lipschitz == b.penalty.g.lipschitz);
  REQUIRE(a.penalty.g.terms.size() == b.penalty.g.terms.size());
  for (std::size_t i = 0; i < a.penalty.g.terms.size(); ++i) {
    CHECK(a.penalty.g.terms[i].dof == b.penalty.g.terms[i].dof);
    CHECK(a.penalty.g.terms[i].weight == b.penalty.g.terms[i].weight);
  }
}
