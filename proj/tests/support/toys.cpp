#include "support/toys.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace testsup {

using namespace qvi;

GalerkinProblem identity_problem(int n, Vec f, ConstraintSet k) {
  GramInner gx(SparseMat::identity(n));
  GramInner gy(SparseMat::identity(n));
  OperatorSpec a;
  a.linear = SparseMat::identity(n);
  a.m = 1.0;
  a.M = 1.0;
  TraceMap pi;
  pi.pi = SparseMat::identity(n);
  pi.c0 = 1.0;
  return GalerkinProblem::make(std::move(gx), std::move(gy), std::move(a), std::move(k),
                               FrictionFunctional{}, std::move(pi), std::move(f));
}

namespace {

// Symmetric diagonally dominant matrix with Gershgorin bounds:
// every eigenvalue lies in [min_i margin_i, max_i (diag_i + offsum_i)].
struct SymDense {
  std::vector<Vec> a;
  double m_lo = 0.0;
  double m_hi = 0.0;
};

SymDense random_sym(qvi::Rng& rng, int n) {
  SymDense out;
  out.a.assign(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.uniform() < 0.4 ? 0.0 : rng.uniform(-0.5, 0.5);
      out.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      out.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  out.m_lo = kInf;
  out.m_hi = 0.0;
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += std::fabs(out.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    const double margin = rng.uniform(0.5, 1.5);
    out.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = off + margin;
    out.m_lo = std::min(out.m_lo, margin);
    out.m_hi = std::max(out.m_hi, 2.0 * off + margin);
  }
  return out;
}

SparseMat to_sparse(const std::vector<Vec>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0)
        ts.push_back({i, j, a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
  return SparseMat::from_triplets(n, n, std::move(ts));
}

}  // namespace

BoxInstance random_box_instance(Rng& rng, int n, const BoxOptions& opt) {
  BoxInstance inst;
  inst.flavour = opt.flavour >= 0 ? opt.flavour : rng.uniform_int(0, 3);

  SymDense sym = random_sym(rng, n);
  std::vector<Vec> afull = sym.a;
  double m = sym.m_lo;
  double big_m = sym.m_hi;

  if (inst.flavour == 3) {
    // Skew perturbation keeps the symmetric part (hence m) intact; the
    // Lipschitz bound falls back to the Schur estimate sqrt(|A|_1 |A|_inf).
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double w = rng.uniform(-0.3, 0.3);
        afull[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += w;
        afull[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] -= w;
      }
    double n1 = 0.0, ninf = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; ++j) {
        row += std::fabs(afull[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        col += std::fabs(afull[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
      }
      ninf = std::max(ninf, row);
      n1 = std::max(n1, col);
    }
    big_m = std::sqrt(n1 * ninf);
  }

  SparseMat gram;
  double c0 = 1.0;
  if (inst.flavour == 1) {
    Vec g(static_cast<std::size_t>(n));
    double gmin = kInf, gmax = 0.0;
    for (double& v : g) {
      v = rng.uniform(0.5, 2.0);
      gmin = std::min(gmin, v);
      gmax = std::max(gmax, v);
    }
    gram = SparseMat::diagonal(g);
    // Gershgorin of the symmetrically scaled matrix G^{-1/2} A G^{-1/2}.
    // Scaling can destroy diagonal dominance, so the disc floor may dip
    // below zero; the Euclidean certificates divided by the Gram extremes
    // always stay valid, and we keep whichever side is sharper.
    double lo = kInf, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i)
          off += std::fabs(afull[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                 std::sqrt(g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)]);
      const double di =
          afull[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] / g[static_cast<std::size_t>(i)];
      lo = std::min(lo, di - off);
      hi = std::max(hi, di + off);
    }
    m = std::max(lo, sym.m_lo / gmax);
    big_m = std::min(hi, sym.m_hi / gmin);
    c0 = 1.0 / std::sqrt(gmin);
  } else if (inst.flavour == 2) {
    gram = to_sparse(sym.a);  // X Gram = A: (Au,u)_X = |u|_X^2 exactly
    m = 1.0;
    big_m = 1.0;
    c0 = 1.0 / std::sqrt(sym.m_lo);
  } else {
    gram = SparseMat::identity(n);
  }

  // Monotone one-sided terms only ride on identity-Gram flavours, where the
  // added Lipschitz weight*slope transfers to the X norm unchanged.
  if (opt.allow_terms && (inst.flavour == 0 || inst.flavour == 3) && rng.uniform() < 0.6) {
    const int count = rng.uniform_int(1, 2);
    for (int t = 0; t < count; ++t) {
      NodalTerm term;
      term.dof = rng.uniform_int(0, n - 1);
      term.weight = rng.uniform(0.2, 1.0);
      term.slope = rng.uniform(0.5, 2.0);
      term.sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
      term.offset = rng.uniform(-0.5, 0.5);
      term.one_sided = true;
      big_m += term.weight * term.slope;
      inst.terms.push_back(term);
    }
  }

  ConstraintSet k = ConstraintSet::all_free(n);
  for (int i = 0; i < n; ++i) {
    double lo = -kInf, up = kInf;
    if (rng.uniform() < 0.7) lo = rng.uniform(-1.0, 1.0);
    if (opt.allow_upper && rng.uniform() < 0.4)
      up = (lo > -kInf ? lo : -1.0) + rng.uniform(0.3, 2.0);
    if (lo > -kInf) k.set_lower(i, lo);
    if (up < kInf) k.set_upper(i, up);
    if (opt.allow_pins && rng.uniform() < 0.15) {
      const double v = std::min(std::max(rng.uniform(-1.0, 1.0), lo), up);
      k.set_pin(i, v);
    }
  }

  OperatorSpec a;
  a.linear = to_sparse(afull);
  a.boundary = inst.terms;
  a.m = m;
  a.M = big_m;
  TraceMap pi;
  pi.pi = SparseMat::identity(n);
  pi.c0 = c0;
  inst.a = a.linear;
  inst.p = GalerkinProblem::make(GramInner(std::move(gram)), GramInner(SparseMat::identity(n)),
                                 std::move(a), std::move(k), FrictionFunctional{}, std::move(pi),
                                 rng.vector(n, 1.5));
  return inst;
}

GalerkinProblem contact_toy(double mu, double k, double ft, double fn) {
  const int n = 4;
  OperatorSpec a;
  a.linear = SparseMat::diagonal({2.0, 2.0, 3.0, 3.0});
  a.m = 2.0;
  a.M = 3.0;

  FrictionFunctional j;
  j.kind = FrictionKind::TrescaCoulomb;
  j.mu = mu;
  j.p_slope = 1.0;
  j.eps = 1e-12;
  j.nodes.push_back({1, 0, -1.0, 1.0});  // node 0: normal dof 1, tangent dof 0
  j.nodes.push_back({3, 2, -1.0, 1.0});  // node 1: normal dof 3, tangent dof 2
  // Per node |p(e1) - p(e2)| <= |e1 - e2| and ||v1|-|v2|| <= |v1 - v2|;
  // Cauchy-Schwarz over the nodes gives alpha = gamma = mu for unit weights.
  j.alpha = mu;
  j.beta = 0.0;
  j.gamma = mu;

  ConstraintSet kset = ConstraintSet::all_free(n);
  kset.set_lower(1, -k);  // u_nu = -u_y <= k
  kset.set_lower(3, -k);

  TraceMap pi;
  pi.pi = SparseMat::identity(n);
  pi.c0 = 1.0;
  return GalerkinProblem::make(GramInner(SparseMat::identity(n)),
                               GramInner(SparseMat::identity(n)), std::move(a), std::move(kset),
                               std::move(j), std::move(pi), Vec{ft, -fn, ft, -fn});
}

HeatAssembly heat_strip() {
  Mesh2D mesh = unit_square(4, 1);
  HeatData data = sample_heat_data(
      mesh, [](double x, double) { return -6.0 + 8.0 * x; }, [](double, double) { return 1.0; },
      [](double, double) { return 0.2; });
  return assemble_heat(mesh, data);
}

}  // namespace testsup
