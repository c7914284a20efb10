#include "qvi/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace qvi {

namespace {

constexpr double kRatioGuard = 1e4 * std::numeric_limits<double>::epsilon();

// Per-dof view of the frozen inner problem: quadratic row part plus the
// monotone nodal terms and the smoothed friction term attached to each dof.
struct InnerCtx {
  const GalerkinProblem& p;
  Vec eta;
  double eps;
  std::vector<std::vector<const NodalTerm*>> terms_at;  // operator nodal terms
  std::vector<int> friction_at;   // index into p.j.nodes for tangent dofs, -1
  Vec bond;                       // mu * w * p(eta_n) per friction node
  Vec lin_diag;
  bool symmetric = false;

  InnerCtx(const GalerkinProblem& prob, const Vec& eta_in, double eps_use)
      : p(prob), eta(eta_in), eps(eps_use) {
    const int n = p.dim();
    terms_at.resize(n);
    for (const NodalTerm& t : p.a.boundary) terms_at[t.dof].push_back(&t);
    friction_at.assign(n, -1);
    bond.assign(p.j.nodes.size(), 0.0);
    if (p.j.depends_on_eta()) {
      for (std::size_t i = 0; i < p.j.nodes.size(); ++i) {
        friction_at[p.j.nodes[i].tangent_dof] = static_cast<int>(i);
        bond[i] = p.j.bond(eta, p.j.nodes[i]);
      }
    }
    lin_diag = p.a.linear.diagonal_values();
    double scale = 0.0;
    for (double v : p.a.linear.vals) scale = std::max(scale, std::fabs(v));
    symmetric = sym_error(p.a.linear) <= 1e-10 * std::max(scale, 1.0);
  }

  bool j_zero() const { return !p.j.depends_on_eta(); }

  // Full residual covector B(u) + grad_v j_eps(eta, u) - F.
  Vec covector(const Vec& u) const {
    Vec r = p.a.covector(u);
    if (!j_zero()) {
      for (std::size_t i = 0; i < p.j.nodes.size(); ++i) {
        const FrictionNode& fn = p.j.nodes[i];
        double t = u[fn.tangent_dof];
        double denom = std::sqrt(t * t + eps * eps);
        if (denom > 0.0) r[fn.tangent_dof] += bond[i] * t / denom;
      }
    }
    axpy(-1.0, p.load(), r);
    return r;
  }

  // Local slope of the residual in dof i at value u_i (>= linear diagonal).
  double slope_at(int i, double ui) const {
    double s = lin_diag[i];
    for (const NodalTerm* t : terms_at[i]) s += t->local_slope(ui);
    int fi = friction_at[i];
    if (fi >= 0 && bond[fi] > 0.0) {
      double d = ui * ui + eps * eps;
      if (d > 0.0) s += bond[fi] * eps * eps / (d * std::sqrt(d));
    }
    return s;
  }

  // Scaled per-dof stationarity: s_i * |clamp_i(u_i - r_i / s_i) - u_i|.
  // Free dofs reduce to |r_i|; correctly-signed active bounds contribute 0.
  double stationarity(const Vec& u, const Vec& cov) const {
    double worst = 0.0;
    const ConstraintSet& k = p.k;
    for (int i = 0; i < p.dim(); ++i) {
      if (k.pinned[i]) continue;
      double s = std::max(slope_at(i, u[i]), 1e-30);
      double trial = u[i] - cov[i] / s;
      trial = std::min(std::max(trial, k.lower[i]), k.upper[i]);
      worst = std::max(worst, s * std::fabs(trial - u[i]));
    }
    return worst;
  }
};

void record_step(InnerLog& log, int iter, double delta, double& prev_delta, double scale) {
  IterationRecord rec;
  rec.iter = iter;
  rec.residual = delta;
  rec.ratio = (prev_delta > kRatioGuard * scale) ? delta / prev_delta
                                                 : std::numeric_limits<double>::quiet_NaN();
  log.records.push_back(rec);
  prev_delta = delta;
}

struct InnerResult {
  Vec u;
  int iterations = 0;
  bool converged = false;
  InnerLog log;
};

// Residual derivative for the 1D subproblem at dof i (monotone in t).
double deriv_1d(const InnerCtx& ctx, int i, double t, double c) {
  double d = ctx.lin_diag[i] * t + c;
  for (const NodalTerm* term : ctx.terms_at[i]) d += term->covector(t);
  int fi = ctx.friction_at[i];
  if (fi >= 0 && ctx.bond[fi] > 0.0) {
    double denom = std::sqrt(t * t + ctx.eps * ctx.eps);
    if (denom > 0.0) d += ctx.bond[fi] * t / denom;
  }
  return d;
}

// Exact 1D minimization over [lo, hi]: solve deriv(t) = 0, clamped. The
// derivative is strictly increasing (lin_diag > 0 plus monotone terms).
double minimize_1d(const InnerCtx& ctx, int i, double c, double lo, double hi, double guess) {
  double a = ctx.lin_diag[i];
  bool plain = ctx.terms_at[i].empty() && (ctx.friction_at[i] < 0 || ctx.bond[ctx.friction_at[i]] == 0.0);
  if (plain) {
    double t = -c / a;
    return std::min(std::max(t, lo), hi);
  }
  // Bracket the root.
  double span = std::max(1.0, std::fabs(guess)) * 0.5;
  double t_lo = std::isfinite(lo) ? lo : guess - span;
  double t_hi = std::isfinite(hi) ? hi : guess + span;
  if (!std::isfinite(lo)) {
    while (deriv_1d(ctx, i, t_lo, c) > 0.0) {
      span *= 2.0;
      t_lo = guess - span;
      if (span > 1e30) break;
    }
  }
  if (!std::isfinite(hi)) {
    span = std::max(1.0, std::fabs(guess)) * 0.5;
    while (deriv_1d(ctx, i, t_hi, c) < 0.0) {
      span *= 2.0;
      t_hi = guess + span;
      if (span > 1e30) break;
    }
  }
  double d_lo = deriv_1d(ctx, i, t_lo, c);
  if (d_lo >= 0.0) return t_lo;
  double d_hi = deriv_1d(ctx, i, t_hi, c);
  if (d_hi <= 0.0) return t_hi;
  // Safeguarded Newton on the bracket.
  double t = std::min(std::max(guess, t_lo), t_hi);
  for (int it = 0; it < 100; ++it) {
    double d = deriv_1d(ctx, i, t, c);
    if (d > 0.0) {
      t_hi = t;
    } else if (d < 0.0) {
      t_lo = t;
    } else {
      return t;
    }
    double s = ctx.slope_at(i, t);
    double t_new = t - d / s;
    if (!(t_new > t_lo && t_new < t_hi)) t_new = 0.5 * (t_lo + t_hi);
    if (std::fabs(t_new - t) <= 1e-15 * (1.0 + std::fabs(t_new))) return t_new;
    t = t_new;
  }
  return t;
}

InnerResult run_fixed_point(const InnerCtx& ctx, const SolverParams& params, double rho,
                            double stat_target_rel, Vec u) {
  InnerResult res;
  res.log.method = "fixed_point";
  res.log.rho = rho;
  const GramInner& gx = ctx.p.inner_x;
  const double proj_tol = std::max(0.02 * stat_target_rel, 1e-14);
  Vec warm(static_cast<std::size_t>(ctx.p.dim()), 0.0);
  double prev_delta = -1.0;
  for (int it = 1; it <= params.max_inner; ++it) {
    Vec cov = ctx.covector(u);
    double scale = std::max(1.0, gx.norm(u));
    double stat = ctx.stationarity(u, cov);
    Vec g = gx.riesz(cov, 1e-13, &warm);
    warm = g;
    Vec u1(u);
    axpy(-rho, g, u1);
    u1 = metric_project(gx, ctx.p.k, u1, proj_tol * scale, &u);
    double delta = gx.dist(u1, u);
    // delta is exactly the X-norm residual the convergence certificate
    // recomputes, so gate the exit on it alongside the per-dof check: the
    // two drift apart as the Gram conditioning worsens with refinement.
    if (stat <= stat_target_rel * scale && delta <= 0.9 * params.inner_tol * scale) {
      res.u = std::move(u);
      res.iterations = it - 1;
      res.converged = true;
      res.log.stat_residual = stat;
      return res;
    }
    record_step(res.log, it, delta, prev_delta, scale);
    u = std::move(u1);
    res.iterations = it;
  }
  res.u = std::move(u);
  res.converged = false;
  Vec cov = ctx.covector(res.u);
  res.log.stat_residual = ctx.stationarity(res.u, cov);
  return res;
}

InnerResult run_psor(const InnerCtx& ctx, const SolverParams& params, double rho,
                     double stat_target_rel, Vec u) {
  InnerResult res;
  res.log.method = "psor";
  res.log.rho = rho;
  const GalerkinProblem& p = ctx.p;
  const SparseMat& s = p.a.linear;
  const Vec& load = p.load();
  const GramInner& gx = p.inner_x;
  double prev_delta = -1.0;
  Vec u_old(u);
  for (int sweep = 1; sweep <= params.max_inner; ++sweep) {
    u_old = u;
    for (int i = 0; i < p.dim(); ++i) {
      if (p.k.pinned[i]) continue;
      // c = off-diagonal row action minus load at dof i.
      double c = -load[i];
      for (int kk = s.row_ptr[i]; kk < s.row_ptr[i + 1]; ++kk) {
        int col = s.col_idx[kk];
        if (col != i) c += s.vals[kk] * u[col];
      }
      double lo = p.k.lower[i], hi = p.k.upper[i];
      double t = minimize_1d(ctx, i, c, lo, hi, u[i]);
      bool plain = ctx.terms_at[i].empty() &&
                   (ctx.friction_at[i] < 0 || ctx.bond[ctx.friction_at[i]] == 0.0);
      if (plain && params.omega != 1.0) {
        t = u[i] + params.omega * (t - u[i]);
        t = std::min(std::max(t, lo), hi);
      }
      u[i] = t;
    }
    double delta = gx.dist(u, u_old);
    double scale = std::max(1.0, gx.norm(u));
    record_step(res.log, sweep, delta, prev_delta, scale);
    res.iterations = sweep;
    Vec cov = ctx.covector(u);
    double stat = ctx.stationarity(u, cov);
    res.log.stat_residual = stat;
    if (stat <= stat_target_rel * scale) {
      // Same certificate gate as the fixed-point loop; the sweep
      // displacement alone says nothing about the rho-map residual.
      Vec g = gx.riesz(cov, 1e-13);
      Vec u1(u);
      axpy(-rho, g, u1);
      u1 = metric_project(gx, p.k, u1, std::max(0.02 * stat_target_rel, 1e-14) * scale, &u);
      if (gx.dist(u1, u) <= 0.9 * params.inner_tol * scale) {
        res.converged = true;
        break;
      }
    }
  }
  res.u = std::move(u);
  return res;
}

InnerMethod resolve_method(const GalerkinProblem& p, const SolverParams& params, double kappa,
                           bool symmetric) {
  if (params.method == InnerMethod::FixedPoint) return InnerMethod::FixedPoint;
  if (params.method == InnerMethod::Psor) {
    if (!symmetric) throw Error("solver: psor requires a symmetric linear part");
    return InnerMethod::Psor;
  }
  if (!symmetric) return InnerMethod::FixedPoint;
  return kappa <= 0.99 ? InnerMethod::FixedPoint : InnerMethod::Psor;
}

InnerResult inner_solve(const GalerkinProblem& p, const Vec& eta, const SolverParams& params,
                        const Vec* start) {
  double rho = resolve_rho(p, params);
  double kappa = contraction_factor(p, params);
  double eps = params.eps_smooth > 0.0 ? params.eps_smooth : p.j.eps;
  InnerCtx ctx(p, eta, eps);
  Vec u0 = start ? p.k.project(*start) : p.k.validate();
  InnerMethod method = resolve_method(p, params, kappa, ctx.symmetric);
  // Per-dof stationarity target one order below inner_tol; the loops also
  // gate their exits on the rho-map residual checked below.
  double stat_target = 0.1 * params.inner_tol;
  InnerResult res = (method == InnerMethod::FixedPoint)
                        ? run_fixed_point(ctx, params, rho, stat_target, std::move(u0))
                        : run_psor(ctx, params, rho, stat_target, std::move(u0));
  res.log.j_zero = ctx.j_zero();
  res.log.m = p.a.m;
  res.log.M = p.a.M;
  res.log.rho = rho;
  res.log.kappa = kappa;
  res.log.iterations = res.iterations;
  res.log.converged = res.converged;
  // Fixed-point residual certificate ||u - project(u - rho grad)||_X.
  Vec cov = ctx.covector(res.u);
  Vec g = p.inner_x.riesz(cov, 1e-13);
  Vec u1(res.u);
  axpy(-rho, g, u1);
  u1 = metric_project(p.inner_x, p.k, u1, std::max(0.02 * stat_target, 1e-14), &res.u);
  res.log.fp_residual = p.inner_x.dist(u1, res.u);
  double scale = std::max(1.0, p.inner_x.norm(res.u));
  if (res.converged && res.log.fp_residual > params.inner_tol * scale) res.converged = false;
  return res;
}

void write_log_file(const std::string& path, const std::vector<InnerLog>& logs) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error("solver: cannot open log path " + path);
  out << "iter,residual,ratio\n";
  int block = 0;
  for (const InnerLog& log : logs) {
    out << "# inner_solve=" << block++ << " method=" << log.method
        << " j_zero=" << (log.j_zero ? 1 : 0) << " m=" << log.m << " M=" << log.M
        << " rho=" << log.rho << " kappa=" << log.kappa << "\n";
    char buf[128];
    for (const IterationRecord& r : log.records) {
      std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g\n", r.iter, r.residual, r.ratio);
      out << buf;
    }
  }
}

}  // namespace

double InnerLog::max_ratio_after(int skip) const {
  double worst = 0.0;
  for (const IterationRecord& r : records) {
    if (r.iter <= skip) continue;
    if (std::isnan(r.ratio)) continue;
    worst = std::max(worst, r.ratio);
  }
  return worst;
}

double resolve_rho(const GalerkinProblem& p, const SolverParams& params) {
  double m = p.a.m, M = p.a.M;
  double rho = params.rho > 0.0 ? params.rho : m / (M * M);
  if (!(rho > 0.0) || rho >= 2.0 * m / (M * M))
    throw Error("solver: rho outside (0, 2m/M^2)");
  return rho;
}

double contraction_factor(const GalerkinProblem& p, const SolverParams& params) {
  double m = p.a.m, M = p.a.M;
  double rho = resolve_rho(p, params);
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * rho * m + rho * rho * M * M));
}

Vec metric_project(const GramInner& gx, const ConstraintSet& k, const Vec& z, double tol,
                   const Vec* warm) {
  const SparseMat& g = gx.gram;
  const int n = g.rows;
  if (static_cast<int>(z.size()) != n) throw DimensionError("metric_project: size mismatch");
  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int kk = g.row_ptr[i]; kk < g.row_ptr[i + 1]; ++kk)
      if (g.col_idx[kk] != i && g.vals[kk] != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) return k.project(z);

  // min 1/2 w^T G w - w^T G z over the box: Gauss-Seidel with clamping,
  // stopped on the scaled complementarity of the gradient G(w - z).
  Vec q = spmv(g, z);
  Vec w = warm ? k.project(*warm) : k.project(z);
  Vec gdiag = g.diagonal_values();
  for (int sweep = 0; sweep < 100000; ++sweep) {
    for (int i = 0; i < n; ++i) {
      if (k.pinned[i]) continue;
      double c = q[i];
      for (int kk = g.row_ptr[i]; kk < g.row_ptr[i + 1]; ++kk) {
        const int col = g.col_idx[kk];
        if (col != i) c -= g.vals[kk] * w[col];
      }
      w[i] = std::min(std::max(c / gdiag[i], k.lower[i]), k.upper[i]);
    }
    Vec grad = spmv(g, w);
    axpy(-1.0, q, grad);
    double stat = 0.0;
    for (int i = 0; i < n; ++i) {
      if (k.pinned[i]) continue;
      double trial = w[i] - grad[i] / gdiag[i];
      trial = std::min(std::max(trial, k.lower[i]), k.upper[i]);
      stat = std::max(stat, gdiag[i] * std::fabs(trial - w[i]));
    }
    if (stat <= tol) return w;
  }
  throw NonConvergence("metric_project: no convergence", 100000, tol);
}

Vec solve_vi_frozen(const GalerkinProblem& p, const Vec& eta, const SolverParams& params,
                    InnerLog* log, const Vec* start) {
  if (static_cast<int>(eta.size()) != p.dim())
    throw DimensionError("solve_vi_frozen: eta size mismatch");
  InnerResult res = inner_solve(p, eta, params, start);
  if (log) *log = res.log;
  if (!params.log_path.empty()) write_log_file(params.log_path, {res.log});
  if (!res.converged) {
    NonConvergence err("solve_vi_frozen: no convergence in " + std::to_string(res.iterations) +
                           " inner iterations (" + res.log.method + ")",
                       res.iterations, res.log.stat_residual);
    err.last_iterate = res.u;
    for (const IterationRecord& r : res.log.records) err.residual_history.push_back(r.residual);
    throw err;
  }
  return res.u;
}

Solution solve_qvi(const GalerkinProblem& p, const SolverParams& params, const Vec* eta0) {
  Solution sol;
  Vec eta = eta0 ? p.k.project(*eta0) : p.k.validate();
  if (!p.j.depends_on_eta()) {
    InnerResult res = inner_solve(p, eta, params, &eta);
    sol.u = res.u;
    sol.inner_iterations = res.iterations;
    sol.outer_iterations = 1;
    sol.final_residual = res.log.stat_residual;
    sol.converged = res.converged;
    sol.method = res.log.method;
    sol.inner_logs.push_back(std::move(res.log));
    if (!params.log_path.empty()) write_log_file(params.log_path, sol.inner_logs);
    return sol;
  }

  double prev_delta = -1.0;
  Vec u = eta;
  for (int k = 1; k <= params.max_outer; ++k) {
    InnerResult res = inner_solve(p, eta, params, &u);
    sol.inner_iterations += res.iterations;
    sol.outer_iterations = k;
    sol.method = res.log.method;
    u = res.u;
    sol.inner_logs.push_back(std::move(res.log));
    if (!sol.inner_logs.back().converged) {
      sol.u = u;
      sol.converged = false;
      sol.final_residual = sol.inner_logs.back().stat_residual;
      if (!params.log_path.empty()) write_log_file(params.log_path, sol.inner_logs);
      return sol;
    }
    double delta = p.inner_x.dist(u, eta);
    double scale = std::max(1.0, p.inner_x.norm(u));
    if (prev_delta > kRatioGuard * scale && k >= 2)
      sol.contraction_estimates.push_back(delta / prev_delta);
    sol.final_residual = delta;
    if (delta <= params.outer_tol * scale) {
      sol.u = u;
      sol.converged = true;
      if (!params.log_path.empty()) write_log_file(params.log_path, sol.inner_logs);
      return sol;
    }
    prev_delta = delta;
    eta = u;
  }
  sol.u = u;
  sol.converged = false;
  if (!params.log_path.empty()) write_log_file(params.log_path, sol.inner_logs);
  return sol;
}

double uniqueness_check(const GalerkinProblem& p, const SolverParams& params,
                        const std::vector<Vec>& starts) {
  if (starts.empty()) throw Error("uniqueness_check: no starts");
  std::vector<Vec> sols;
  sols.reserve(starts.size());
  for (const Vec& s : starts) {
    Solution sol = solve_qvi(p, params, &s);
    if (!sol.converged)
      throw NonConvergence("uniqueness_check: solve from a start failed", sol.outer_iterations,
                           sol.final_residual);
    sols.push_back(std::move(sol.u));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t jj = i + 1; jj < sols.size(); ++jj)
      worst = std::max(worst, p.inner_x.dist(sols[i], sols[jj]));
  return worst;
}

}  // namespace qvi
