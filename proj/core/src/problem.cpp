#include "qvi/problem.hpp"

#include <algorithm>
#include <cmath>

namespace qvi {

double NodalTerm::value(double u) const {
  double r = sign * u - offset;
  if (one_sided && r < 0.0) return 0.0;
  return slope * r;
}

double NodalTerm::covector(double u) const { return weight * sign * value(u); }

double NodalTerm::energy(double u) const {
  double r = sign * u - offset;
  if (one_sided && r < 0.0) return 0.0;
  return 0.5 * weight * slope * r * r;
}

double NodalTerm::local_slope(double u) const {
  double r = sign * u - offset;
  if (one_sided && r < 0.0) return 0.0;
  return weight * slope;  // sign^2 = 1
}

Vec OperatorSpec::covector(const Vec& u) const {
  Vec out = spmv(linear, u);
  for (const NodalTerm& t : boundary) out[t.dof] += t.covector(u[t.dof]);
  return out;
}

void OperatorSpec::add_covector(const Vec& u, Vec& into) const {
  Vec lu = spmv(linear, u);
  axpy(1.0, lu, into);
  for (const NodalTerm& t : boundary) into[t.dof] += t.covector(u[t.dof]);
}

Vec apply_A(const OperatorSpec& a, const GramInner& inner_x, const Vec& u) {
  return inner_x.riesz(a.covector(u));
}

double FrictionFunctional::bond(const Vec& eta, const FrictionNode& n) const {
  double r = n.normal_sign * eta[n.normal_dof];
  return mu * n.weight * p_slope * std::max(r, 0.0);
}

double FrictionFunctional::eval(const Vec& eta, const Vec& v, double eps_use) const {
  if (kind == FrictionKind::Zero || mu == 0.0) return 0.0;
  double s = 0.0;
  for (const FrictionNode& n : nodes) {
    double t = v[n.tangent_dof];
    double slip = eps_use > 0.0 ? std::sqrt(t * t + eps_use * eps_use) - eps_use : std::fabs(t);
    s += bond(eta, n) * slip;
  }
  return s;
}

void FrictionFunctional::add_grad(const Vec& eta, const Vec& v, double eps_use, Vec& into) const {
  if (kind == FrictionKind::Zero || mu == 0.0) return;
  for (const FrictionNode& n : nodes) {
    double t = v[n.tangent_dof];
    double denom = std::sqrt(t * t + eps_use * eps_use);
    if (denom > 0.0) into[n.tangent_dof] += bond(eta, n) * t / denom;
  }
}

double eval_j(const FrictionFunctional& j, const Vec& eta, const Vec& v) {
  return j.eval(eta, v);
}

GalerkinProblem GalerkinProblem::build(GramInner inner_x, GramInner inner_y, OperatorSpec a,
                                       ConstraintSet k, FrictionFunctional j, TraceMap pi, Vec f,
                                       Vec extra_load, bool enforce_smallness) {
  GalerkinProblem p;
  const int n = inner_x.dim();
  if (a.linear.rows != n || a.linear.cols != n)
    throw DimensionError("problem: operator dimension mismatch");
  if (k.dim != n) throw DimensionError("problem: constraint dimension mismatch");
  if (pi.pi.cols != n || pi.pi.rows != inner_y.dim())
    throw DimensionError("problem: trace map dimension mismatch");
  if (static_cast<int>(f.size()) != inner_y.dim())
    throw DimensionError("problem: load dimension mismatch");
  if (!extra_load.empty() && static_cast<int>(extra_load.size()) != n)
    throw DimensionError("problem: extra load dimension mismatch");
  check_finite(f, "problem load");
  if (!extra_load.empty()) check_finite(extra_load, "problem extra load");
  for (const NodalTerm& t : a.boundary) {
    if (t.dof < 0 || t.dof >= n) throw DimensionError("problem: boundary term dof out of range");
    if (t.weight < 0.0 || t.slope < 0.0) throw Error("problem: boundary term must be monotone");
  }
  for (const FrictionNode& fn : j.nodes) {
    if (fn.normal_dof < 0 || fn.normal_dof >= n || fn.tangent_dof < 0 || fn.tangent_dof >= n)
      throw DimensionError("problem: friction node dof out of range");
    if (fn.weight < 0.0) throw Error("problem: friction weight must be >= 0");
  }
  if (!(a.m > 0.0) || !(a.M > 0.0) || a.M < a.m)
    throw Error("problem: need certified 0 < m <= M");
  if (j.mu < 0.0 || j.p_slope < 0.0) throw Error("problem: friction constants must be >= 0");
  k.validate();

  p.smallness_ok = a.m > j.alpha && a.m > j.gamma;
  if (enforce_smallness && !p.smallness_ok)
    throw Error("problem: smallness violated, m = " + std::to_string(a.m) +
                ", alpha = " + std::to_string(j.alpha) + ", gamma = " + std::to_string(j.gamma));

  p.inner_x = std::move(inner_x);
  p.inner_y = std::move(inner_y);
  p.a = std::move(a);
  p.k = std::move(k);
  p.j = std::move(j);
  p.pi = std::move(pi);
  p.f = std::move(f);
  p.extra_load = std::move(extra_load);
  p.c0 = p.pi.c0;
  p.load_cov_ = spmv_transpose(p.pi.pi, spmv(p.inner_y.gram, p.f));
  if (!p.extra_load.empty()) axpy(1.0, p.extra_load, p.load_cov_);
  return p;
}

GalerkinProblem GalerkinProblem::make(GramInner inner_x, GramInner inner_y, OperatorSpec a,
                                      ConstraintSet k, FrictionFunctional j, TraceMap pi, Vec f,
                                      Vec extra_load) {
  return build(std::move(inner_x), std::move(inner_y), std::move(a), std::move(k), std::move(j),
               std::move(pi), std::move(f), std::move(extra_load), true);
}

GalerkinProblem GalerkinProblem::make_unchecked(GramInner inner_x, GramInner inner_y,
                                                OperatorSpec a, ConstraintSet k,
                                                FrictionFunctional j, TraceMap pi, Vec f,
                                                Vec extra_load) {
  return build(std::move(inner_x), std::move(inner_y), std::move(a), std::move(k), std::move(j),
               std::move(pi), std::move(f), std::move(extra_load), false);
}

GalerkinProblem GalerkinProblem::with_load(Vec f_new) const {
  if (static_cast<int>(f_new.size()) != ydim())
    throw DimensionError("with_load: load dimension mismatch");
  check_finite(f_new, "with_load");
  GalerkinProblem p(*this);
  p.f = std::move(f_new);
  p.load_cov_ = spmv_transpose(p.pi.pi, spmv(p.inner_y.gram, p.f));
  if (!p.extra_load.empty()) axpy(1.0, p.extra_load, p.load_cov_);
  return p;
}

Vec GalerkinProblem::residual_cov(const Vec& u) const {
  Vec r = a.covector(u);
  axpy(-1.0, load(), r);
  return r;
}

double vi_residual(const GalerkinProblem& p, const Vec& u, const std::vector<Vec>& directions) {
  if (static_cast<int>(u.size()) != p.dim()) throw DimensionError("vi_residual: size mismatch");
  Vec au = p.residual_cov(u);  // B(u) - F as Euclidean covector
  double ju_u = p.j.eval(u, u, 0.0);
  double best = kInf;
  for (const Vec& d : directions) {
    Vec v = p.k.project(d);
    Vec diff = vsub(v, u);
    double val = dot(au, diff) + p.j.eval(u, v, 0.0) - ju_u;
    best = std::min(best, val);
  }
  return best;
}

}  // namespace qvi
