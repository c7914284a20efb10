#include "qvi/fem_contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvi/hypotheses.hpp"

namespace qvi {

namespace {

struct CstGeometry {
  double area = 0.0;
  double b[3];  // gradient coefficients: grad phi_i = (b_i, c_i) / (2 area)
  double c[3];
};

CstGeometry cst_geometry(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                         const std::array<double, 2>& p2) {
  CstGeometry g;
  const std::array<double, 2> p[3] = {p0, p1, p2};
  g.area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  if (g.area <= 0.0) throw Error("cst element: non-positive area");
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g.b[i] = p[j][1] - p[k][1];
    g.c[i] = p[k][0] - p[j][0];
  }
  return g;
}

// area * B' D B for the 3x6 strain-displacement matrix B of the CST element
// and a symmetric 3x3 form D on (eps_xx, eps_yy, gamma_xy).
std::array<std::array<double, 6>, 6> cst_form(const CstGeometry& g,
                                              const std::array<std::array<double, 3>, 3>& D) {
  double B[3][6] = {};
  const double inv2a = 1.0 / (2.0 * g.area);
  for (int i = 0; i < 3; ++i) {
    B[0][2 * i] = g.b[i] * inv2a;
    B[1][2 * i + 1] = g.c[i] * inv2a;
    B[2][2 * i] = g.c[i] * inv2a;
    B[2][2 * i + 1] = g.b[i] * inv2a;
  }
  std::array<std::array<double, 6>, 6> K{};
  for (int r = 0; r < 6; ++r) {
    for (int s = 0; s < 6; ++s) {
      double acc = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) acc += B[a][r] * D[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * B[b][s];
      K[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = g.area * acc;
    }
  }
  return K;
}

void lame_constants(double youngs, double poisson, double* mu_l, double* lambda_l) {
  if (!(youngs > 0.0) || !(poisson > 0.0) || !(poisson < 0.5))
    throw ConfigError("elasticity: need E > 0 and 0 < nu < 1/2");
  *mu_l = youngs / (2.0 * (1.0 + poisson));
  *lambda_l = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
}

}  // namespace

std::array<std::array<double, 6>, 6> cst_stiffness(const std::array<double, 2>& p0,
                                                   const std::array<double, 2>& p1,
                                                   const std::array<double, 2>& p2,
                                                   double youngs, double poisson) {
  double mu_l, lambda_l;
  lame_constants(youngs, poisson, &mu_l, &lambda_l);
  const std::array<std::array<double, 3>, 3> D = {{{2.0 * mu_l + lambda_l, lambda_l, 0.0},
                                                   {lambda_l, 2.0 * mu_l + lambda_l, 0.0},
                                                   {0.0, 0.0, mu_l}}};
  return cst_form(cst_geometry(p0, p1, p2), D);
}

std::array<std::array<double, 6>, 6> cst_strain_gram(const std::array<double, 2>& p0,
                                                     const std::array<double, 2>& p1,
                                                     const std::array<double, 2>& p2) {
  // eps:eps = eps_xx^2 + eps_yy^2 + gamma^2 / 2 in Voigt variables.
  const std::array<std::array<double, 3>, 3> D0 = {{{1.0, 0.0, 0.0},
                                                    {0.0, 1.0, 0.0},
                                                    {0.0, 0.0, 0.5}}};
  return cst_form(cst_geometry(p0, p1, p2), D0);
}

SparseMat full_elastic_stiffness(const Mesh2D& mesh, double youngs, double poisson) {
  const int n = 2 * static_cast<int>(mesh.node_count());
  std::vector<Triplet> ts;
  for (const auto& tri : mesh.tris) {
    const auto K = cst_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]],
                                 youngs, poisson);
    for (int a = 0; a < 6; ++a) {
      const int ra = 2 * static_cast<int>(tri[static_cast<std::size_t>(a / 2)]) + a % 2;
      for (int b = 0; b < 6; ++b) {
        const int cb = 2 * static_cast<int>(tri[static_cast<std::size_t>(b / 2)]) + b % 2;
        ts.push_back({ra, cb, K[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]});
      }
    }
  }
  return SparseMat::from_triplets(n, n, ts);
}

Vec ContactAssembly::normal_gap(const Vec& u) const {
  Vec out(contact_nodes.size());
  for (std::size_t i = 0; i < contact_nodes.size(); ++i)
    out[i] = -u[static_cast<std::size_t>(contact_y[i])];
  return out;
}

Vec ContactAssembly::tangential_slip(const Vec& u) const {
  Vec out(contact_nodes.size());
  for (std::size_t i = 0; i < contact_nodes.size(); ++i)
    out[i] = u[static_cast<std::size_t>(contact_x[i])];
  return out;
}

double ContactAssembly::penetration(const Vec& u) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < contact_nodes.size(); ++i)
    worst = std::max(worst, -u[static_cast<std::size_t>(contact_y[i])] - layer_k);
  return std::max(0.0, worst);
}

ContactAssembly assemble_contact(const Mesh2D& mesh, const ElasticityData& data,
                                 bool enforce_smallness) {
  mesh.validate();
  if (!(data.cp > 0.0) || !(data.cq > 0.0))
    throw ConfigError("assemble_contact: compliance slopes must be > 0");
  if (!(data.k > 0.0) || !(data.k_tilde >= data.k))
    throw ConfigError("assemble_contact: need 0 < k <= k_tilde");

  ContactAssembly ca;
  ca.layer_k = data.k;
  lame_constants(data.youngs, data.poisson, &ca.mu_lame, &ca.lambda_lame);

  // Clamp part-1 nodes (both dofs).
  const std::size_t n_nodes = mesh.node_count();
  std::vector<char> clamped(n_nodes, 0);
  for (std::size_t node : mesh.boundary_nodes(1)) clamped[node] = 1;
  ca.base_of_node.assign(n_nodes, -1);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (!clamped[i]) {
      ca.base_of_node[i] = 2 * static_cast<int>(ca.node_of_pair.size());
      ca.node_of_pair.push_back(i);
    }
  }
  const int n_pairs = static_cast<int>(ca.node_of_pair.size());
  const int n_free = 2 * n_pairs;
  if (n_pairs == 0) throw Error("assemble_contact: no free dofs");

  // Elastic stiffness and strain Gram on free dofs; scalar mass for the
  // body-force block of Y.
  std::vector<Triplet> st, gt, mt;
  for (const auto& tri : mesh.tris) {
    const auto K = cst_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]],
                                 data.youngs, data.poisson);
    const auto G = cst_strain_gram(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    const auto M = p1_mass(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    for (int a = 0; a < 3; ++a) {
      const int pa = ca.base_of_node[tri[static_cast<std::size_t>(a)]];
      if (pa < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int pb = ca.base_of_node[tri[static_cast<std::size_t>(b)]];
        if (pb < 0) continue;
        for (int ca_ = 0; ca_ < 2; ++ca_) {
          for (int cb = 0; cb < 2; ++cb) {
            const std::size_t la = static_cast<std::size_t>(2 * a + ca_);
            const std::size_t lb = static_cast<std::size_t>(2 * b + cb);
            st.push_back({pa + ca_, pb + cb, K[la][lb]});
            gt.push_back({pa + ca_, pb + cb, G[la][lb]});
          }
        }
        mt.push_back({pa / 2, pb / 2, M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]});
      }
    }
  }
  ca.stiffness = SparseMat::from_triplets(n_free, n_free, st);
  ca.strain_gram = SparseMat::from_triplets(n_free, n_free, gt);
  GramInner inner_x(ca.strain_gram);
  SparseMat mass_scalar = SparseMat::from_triplets(n_pairs, n_pairs, mt);

  // Contact nodes on part 3 (the clamped corner drops out).
  const auto g3_nodes = mesh.boundary_nodes(3);
  const auto g3_weights = mesh.boundary_weights(3);
  std::vector<Triplet> nt;  // lumped part-3 trace form on both dof components
  for (std::size_t i = 0; i < g3_nodes.size(); ++i) {
    const int base = ca.base_of_node[g3_nodes[i]];
    if (base < 0) continue;
    ca.contact_nodes.push_back(g3_nodes[i]);
    ca.contact_x.push_back(base);
    ca.contact_y.push_back(base + 1);
    ca.contact_weights.push_back(g3_weights[i]);
    nt.push_back({base, base, g3_weights[i]});
    nt.push_back({base + 1, base + 1, g3_weights[i]});
  }
  if (ca.contact_nodes.empty()) throw Error("assemble_contact: no free contact nodes");
  ca.d0_sq = 1.05 * max_generalized_eigenvalue(SparseMat::from_triplets(n_free, n_free, nt),
                                               inner_x);

  // Friction coefficient: keep alpha = mu cp d0^2 a definite fraction of
  // m = 2 mu_L unless the caller fixes mu explicitly.
  const double m_elastic = 2.0 * ca.mu_lame;
  ca.mu = data.mu >= 0.0 ? data.mu
                         : data.smallness_fraction * m_elastic / (data.cp * ca.d0_sq);

  OperatorSpec a;
  a.linear = ca.stiffness;
  a.m = m_elastic;
  a.M = 2.0 * (ca.mu_lame + ca.lambda_lame) + data.cp * ca.d0_sq;

  ConstraintSet k = ConstraintSet::all_free(n_free);
  ConstraintSet k_tilde = ConstraintSet::all_free(n_free);
  PenaltyOperator g;
  FrictionFunctional j;
  j.kind = ca.mu > 0.0 ? FrictionKind::TrescaCoulomb : FrictionKind::Zero;
  j.mu = ca.mu;
  j.p_slope = data.cp;
  j.alpha = ca.mu * data.cp * ca.d0_sq;
  j.beta = 0.0;
  j.gamma = j.alpha;
  for (std::size_t i = 0; i < ca.contact_nodes.size(); ++i) {
    const int dx = ca.contact_x[i], dy = ca.contact_y[i];
    const double w = ca.contact_weights[i];
    // Normal compliance: pressure cp * max(u_nu, 0) with u_nu = -u_y.
    a.boundary.push_back({dy, w, -1.0, 0.0, data.cp, true});
    // Layer thickness bound u_nu <= k, relaxed to k_tilde for the penalty.
    k.set_lower(dy, -data.k);
    k_tilde.set_lower(dy, -data.k_tilde);
    // Backing layer: pressure cq * max(u_nu - k, 0), vanishes on K.
    g.terms.push_back({dy, w, -1.0, data.k, data.cq, true});
    j.nodes.push_back({dy, dx, -1.0, w});
  }
  g.lipschitz = data.cq * ca.d0_sq;

  // Control space Y = body force on every free dof + traction on part-2
  // dofs, with the block-diagonal L2 Gram.
  const auto g2_nodes = mesh.boundary_nodes(2);
  const auto g2_weights = mesh.boundary_weights(2);
  std::vector<int> g2_base;
  std::vector<double> g2_w;
  for (std::size_t i = 0; i < g2_nodes.size(); ++i) {
    const int base = ca.base_of_node[g2_nodes[i]];
    if (base < 0) continue;
    g2_base.push_back(base);
    g2_w.push_back(g2_weights[i]);
  }
  ca.y_body_dim = n_free;
  const int n_y = n_free + 2 * static_cast<int>(g2_base.size());
  std::vector<Triplet> gy, pit, ht;
  for (int r = 0; r < mass_scalar.rows; ++r) {
    for (int idx = mass_scalar.row_ptr[static_cast<std::size_t>(r)];
         idx < mass_scalar.row_ptr[static_cast<std::size_t>(r) + 1]; ++idx) {
      const int c = mass_scalar.col_idx[static_cast<std::size_t>(idx)];
      const double v = mass_scalar.vals[static_cast<std::size_t>(idx)];
      for (int comp = 0; comp < 2; ++comp) {
        gy.push_back({2 * r + comp, 2 * c + comp, v});
        ht.push_back({2 * r + comp, 2 * c + comp, data.a0 * v});
      }
    }
  }
  for (int d = 0; d < n_free; ++d) pit.push_back({d, d, 1.0});
  for (std::size_t i = 0; i < g2_base.size(); ++i) {
    for (int comp = 0; comp < 2; ++comp) {
      const int yrow = n_free + 2 * static_cast<int>(i) + comp;
      gy.push_back({yrow, yrow, g2_w[i]});
      ht.push_back({yrow, yrow, data.a2 * g2_w[i]});
      pit.push_back({yrow, g2_base[i] + comp, 1.0});
    }
  }
  GramInner inner_y(SparseMat::from_triplets(n_y, n_y, gy));
  SparseMat pi_mat = SparseMat::from_triplets(n_y, n_free, pit);

  // Trace bound ||pi v||_Y <= c0 ||v||_X, certified from below then inflated.
  const SparseMat pi_t = pi_mat.transpose();
  const auto pi_form = [&](const Vec& v) { return spmv(pi_t, spmv(inner_y.gram, spmv(pi_mat, v))); };
  const double c0 = std::sqrt(1.05 * max_generalized_eigenvalue(pi_form, inner_x));
  TraceMap pi{pi_mat, c0};

  // Loads: constant body force and part-2 traction expressed in Y.
  Vec f(static_cast<std::size_t>(n_y), 0.0);
  for (int p_ = 0; p_ < n_pairs; ++p_) {
    f[static_cast<std::size_t>(2 * p_)] = data.body_force[0];
    f[static_cast<std::size_t>(2 * p_ + 1)] = data.body_force[1];
  }
  for (std::size_t i = 0; i < g2_base.size(); ++i) {
    f[static_cast<std::size_t>(n_free) + 2 * i] = data.traction[0];
    f[static_cast<std::size_t>(n_free) + 2 * i + 1] = data.traction[1];
  }

  // Tracking cost: observed quantity is the normal displacement profile on
  // the contact boundary; control energy uses the Y Gram blocks.
  SeparableCost cost;
  std::vector<Triplet> ot, wt;
  for (std::size_t i = 0; i < ca.contact_nodes.size(); ++i) {
    ot.push_back({static_cast<int>(i), ca.contact_y[i], -1.0});
    wt.push_back({static_cast<int>(i), static_cast<int>(i), data.a3 * ca.contact_weights[i]});
  }
  const int n_c = static_cast<int>(ca.contact_nodes.size());
  cost.obs = SparseMat::from_triplets(n_c, n_free, ot);
  cost.target.assign(static_cast<std::size_t>(n_c), data.theta);
  cost.wg = SparseMat::from_triplets(n_c, n_c, wt);
  cost.h = SparseMat::from_triplets(n_y, n_y, ht);
  ca.cost = std::move(cost);

  ca.problem = enforce_smallness
                   ? GalerkinProblem::make(inner_x, inner_y, std::move(a), std::move(k),
                                           std::move(j), std::move(pi), std::move(f))
                   : GalerkinProblem::make_unchecked(inner_x, inner_y, std::move(a), std::move(k),
                                                     std::move(j), std::move(pi), std::move(f));
  ca.penalty.k_tilde = std::move(k_tilde);
  ca.penalty.g = std::move(g);
  return ca;
}

double coulomb_fixed_point_diagnostics(const Solution& s) {
  double worst = 0.0;
  for (double r : s.contraction_estimates)
    if (std::isfinite(r)) worst = std::max(worst, r);
  return worst;
}

SweepResult layered_foundation_experiment(const ContactAssembly& ca,
                                          const PenaltySchedule& sched,
                                          const SolverParams& params, int threads) {
  SweepResult sweep = penalty_sweep(ca.problem, ca.penalty, sched, nullptr, params, threads);
  sweep.table.extra_name = "penetration";
  for (std::size_t i = 0; i < sweep.table.rows.size(); ++i) {
    SweepRow& row = sweep.table.rows[i];
    row.extra = row.ok ? ca.penetration(sweep.solutions[i].u)
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return sweep;
}

SweepResult layered_foundation_experiment(const Mesh2D& mesh, const ElasticityData& data,
                                          const PenaltySchedule& sched,
                                          const SolverParams& params, int threads) {
  return layered_foundation_experiment(assemble_contact(mesh, data), sched, params, threads);
}

}  // namespace qvi
