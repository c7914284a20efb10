#include "qvi/fem_heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvi/hypotheses.hpp"

namespace qvi {

HeatData sample_heat_data(const Mesh2D& mesh,
                          const std::function<double(double, double)>& source,
                          const std::function<double(double, double)>& b,
                          const std::function<double(double, double)>& q) {
  HeatData d;
  const std::size_t n = mesh.node_count();
  d.source.resize(n);
  d.gamma2_b.resize(n);
  d.gamma3_q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mesh.nodes[i][0], y = mesh.nodes[i][1];
    d.source[i] = source ? source(x, y) : 0.0;
    d.gamma2_b[i] = b ? b(x, y) : 0.0;
    d.gamma3_q[i] = q ? q(x, y) : 0.0;
  }
  return d;
}

double HeatAssembly::gamma2_gap(const Vec& u) const {
  double s = 0.0;
  for (std::size_t i = 0; i < gamma2_dofs.size(); ++i) {
    const double gap = u[static_cast<std::size_t>(gamma2_dofs[i])] - gamma2_values[i];
    s += gamma2_weights[i] * gap * gap;
  }
  return std::sqrt(s);
}

HeatAssembly assemble_heat(const Mesh2D& mesh, const HeatData& data) {
  mesh.validate();
  const std::size_t n_nodes = mesh.node_count();
  if (data.source.size() != n_nodes || data.gamma2_b.size() != n_nodes ||
      data.gamma3_q.size() != n_nodes)
    throw DimensionError("assemble_heat: data fields must have one value per node");

  HeatAssembly ha;

  // Eliminate part-1 (zero temperature) nodes.
  std::vector<char> is_dirichlet(n_nodes, 0);
  for (std::size_t node : mesh.boundary_nodes(1)) is_dirichlet[node] = 1;
  ha.free_of_node.assign(n_nodes, -1);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (!is_dirichlet[i]) {
      ha.free_of_node[i] = static_cast<int>(ha.node_of_free.size());
      ha.node_of_free.push_back(i);
    }
  }
  const int n_free = static_cast<int>(ha.node_of_free.size());
  if (n_free == 0) throw Error("assemble_heat: no free dofs");

  // Stiffness and mass on the free dofs (homogeneous elimination).
  std::vector<Triplet> st, mt;
  for (const auto& tri : mesh.tris) {
    const auto K = p1_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    const auto M = p1_mass(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    for (int a = 0; a < 3; ++a) {
      const int ra = ha.free_of_node[tri[static_cast<std::size_t>(a)]];
      if (ra < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int cb = ha.free_of_node[tri[static_cast<std::size_t>(b)]];
        if (cb < 0) continue;
        st.push_back({ra, cb, K[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]});
        mt.push_back({ra, cb, M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]});
      }
    }
  }
  ha.stiffness = SparseMat::from_triplets(n_free, n_free, st);
  ha.mass = SparseMat::from_triplets(n_free, n_free, mt);

  // X Gram = stiffness + mass (H1 inner product).
  std::vector<Triplet> gt = st;
  gt.insert(gt.end(), mt.begin(), mt.end());
  GramInner inner_x(SparseMat::from_triplets(n_free, n_free, gt));
  GramInner inner_y(ha.mass);

  // Discrete Poincare constant C_P = sup (v' M v)/(v' S v); the stiffness is
  // SPD thanks to the part-1 elimination. Power iteration approaches the
  // true value from below, so inflate before certifying m.
  GramInner inner_s(ha.stiffness);
  const double cp_hat = max_generalized_eigenvalue(ha.mass, inner_s);
  ha.poincare = 1.05 * cp_hat;

  OperatorSpec a;
  a.linear = ha.stiffness;
  // (S v, v) >= m (v, (S+M) v) with m = 1/(1 + C_P); Lipschitz constant of
  // Gram^{-1} S in the Gram norm is at most 1 since S <= S + M as forms.
  a.m = 1.0 / (1.0 + ha.poincare);
  a.M = 1.0;

  // Constraints: temperature >= 0 everywhere; prescribed value on part 2.
  ConstraintSet k = ConstraintSet::all_free(n_free);
  ConstraintSet k_tilde = ConstraintSet::all_free(n_free);
  for (int d = 0; d < n_free; ++d) {
    k.set_lower(d, 0.0);
    k_tilde.set_lower(d, 0.0);
  }
  const auto g2_nodes = mesh.boundary_nodes(2);
  const auto g2_weights = mesh.boundary_weights(2);
  PenaltyOperator g;
  std::vector<Triplet> wt;  // diagonal part-2 weight form for the Lipschitz bound
  for (std::size_t i = 0; i < g2_nodes.size(); ++i) {
    const int d = ha.free_of_node[g2_nodes[i]];
    if (d < 0) continue;  // part-1 corner
    const double b = data.gamma2_b[g2_nodes[i]];
    if (!(b >= 0.0))
      throw ConfigError("assemble_heat: prescribed part-2 temperature must be >= 0");
    k.set_pin(d, b);
    ha.gamma2_dofs.push_back(d);
    ha.gamma2_weights.push_back(g2_weights[i]);
    ha.gamma2_values.push_back(b);
    // Affine exchange term w (u - b): vanishes exactly on K, monotone.
    g.terms.push_back({d, g2_weights[i], 1.0, b, 1.0, false});
    wt.push_back({d, d, g2_weights[i]});
  }
  if (!g.terms.empty()) {
    SparseMat w_form = SparseMat::from_triplets(n_free, n_free, wt);
    g.lipschitz = 1.05 * max_generalized_eigenvalue(w_form, inner_x);
  }

  // Loads: volumetric source through the Y pairing, part-3 flux as a fixed
  // covector on the load side.
  Vec f(static_cast<std::size_t>(n_free), 0.0);
  for (int d = 0; d < n_free; ++d)
    f[static_cast<std::size_t>(d)] = data.source[ha.node_of_free[static_cast<std::size_t>(d)]];
  Vec extra(static_cast<std::size_t>(n_free), 0.0);
  for (const auto& e : mesh.boundary) {
    if (e.label != 3) continue;
    const double half = 0.5 * std::hypot(mesh.nodes[e.b][0] - mesh.nodes[e.a][0],
                                         mesh.nodes[e.b][1] - mesh.nodes[e.a][1]);
    for (std::size_t node : {e.a, e.b}) {
      const int d = ha.free_of_node[node];
      if (d >= 0) extra[static_cast<std::size_t>(d)] -= half * data.gamma3_q[node];
    }
  }

  TraceMap pi{SparseMat::identity(n_free), 1.0};  // ||v||_L2 <= ||v||_H1 exactly
  ha.problem = GalerkinProblem::make(inner_x, inner_y, std::move(a), std::move(k),
                                     FrictionFunctional{}, std::move(pi), std::move(f),
                                     std::move(extra));
  ha.penalty.k_tilde = std::move(k_tilde);
  ha.penalty.g = std::move(g);
  return ha;
}

double complementarity_check(const GalerkinProblem& p, const Vec& u) {
  if (static_cast<int>(u.size()) != p.dim())
    throw DimensionError("complementarity_check: dimension mismatch");
  const Vec r = p.residual_cov(u);
  double worst = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    double defect;
    if (p.k.pinned[s]) {
      defect = std::abs(u[s] - p.k.pin_value[s]);
    } else {
      const bool has_lo = p.k.lower[s] > -kInf;
      const bool has_up = p.k.upper[s] < kInf;
      if (!has_lo && !has_up) {
        defect = std::abs(r[s]);
      } else {
        defect = 0.0;
        if (has_lo) defect = std::max(defect, std::abs(std::min(u[s] - p.k.lower[s], r[s])));
        if (has_up) defect = std::max(defect, std::abs(std::min(p.k.upper[s] - u[s], -r[s])));
        // Between two active-side defects the residual itself may still be
        // nonzero when strictly interior; min picks the binding side above.
      }
    }
    worst = std::max(worst, defect);
  }
  return worst;
}

ControlSpace patch_control_space(const Mesh2D& mesh, const HeatAssembly& ha, int count,
                                 double box) {
  int px = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  px = std::max(px, 1);
  while (count % px != 0) --px;
  const int py = count / px;
  ControlSpace space;
  for (int j = 0; j < count; ++j) {
    Vec b(static_cast<std::size_t>(ha.problem.ydim()), 0.0);
    for (int d = 0; d < ha.problem.ydim(); ++d) {
      const auto& xy = mesh.nodes[ha.node_of_free[static_cast<std::size_t>(d)]];
      const int ix = std::min(px - 1, static_cast<int>(xy[0] * px));
      const int iy = std::min(py - 1, static_cast<int>(xy[1] * py));
      if (iy * px + ix == j) b[static_cast<std::size_t>(d)] = 1.0;
    }
    space.basis.push_back(std::move(b));
  }
  if (box > 0.0) space.box.assign(static_cast<std::size_t>(count), {-box, box});
  return space;
}

namespace {
SparseMat scale_mat(SparseMat m, double factor) {
  for (double& v : m.vals) v *= factor;
  return m;
}
}  // namespace

SeparableCost heat_tracking_cost(const HeatAssembly& ha, double weight_g, double weight_h) {
  SeparableCost cost;
  const int n = ha.problem.dim();
  cost.obs = SparseMat::identity(n);
  cost.target.assign(static_cast<std::size_t>(n), 0.0);
  cost.wg = scale_mat(ha.mass, weight_g);
  cost.h = scale_mat(ha.mass, weight_h);
  return cost;
}

SweepResult robin_limit_experiment(const Mesh2D& mesh, const HeatData& data,
                                   const PenaltySchedule& sched, const SolverParams& params,
                                   int threads) {
  return robin_limit_experiment(assemble_heat(mesh, data), sched, params, threads);
}

SweepResult robin_limit_experiment(const HeatAssembly& ha, const PenaltySchedule& sched,
                                   const SolverParams& params, int threads) {
  SweepResult sweep = penalty_sweep(ha.problem, ha.penalty, sched, nullptr, params, threads);
  sweep.table.extra_name = "gamma2_gap";
  for (std::size_t i = 0; i < sweep.table.rows.size(); ++i) {
    SweepRow& row = sweep.table.rows[i];
    row.extra = row.ok ? ha.gamma2_gap(sweep.solutions[i].u)
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return sweep;
}

}  // namespace qvi
