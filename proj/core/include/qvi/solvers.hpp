#pragma once

#include <string>
#include <vector>

#include "qvi/problem.hpp"

namespace qvi {

// Inner solver selection. FixedPoint is the constructive scheme
//   u <- project(u - rho * grad_form(u))
// whose contraction factor kappa(rho) = sqrt(1 - 2 rho m + rho^2 M^2) < 1
// certifies convergence; it is chosen automatically while kappa is moderate.
// Psor is a projected nonlinear Gauss-Seidel usable when the linear part is
// symmetric; it handles the stiff penalized regimes where kappa ~ 1. Both
// must deliver the same fixed-point residual certificate on return.
enum class InnerMethod { Auto, FixedPoint, Psor };

struct SolverParams {
  double rho = 0.0;          // 0 -> m / M^2
  double inner_tol = 1e-11;  // scaled per-dof stationarity target
  double outer_tol = 1e-9;   // outer fixed-point tolerance in the X norm
  int max_inner = 200000;
  int max_outer = 60;
  InnerMethod method = InnerMethod::Auto;
  double omega = 1.5;        // PSOR over-relaxation on purely quadratic dofs
  double eps_smooth = 0.0;   // 0 -> friction functional's stored eps
  std::string log_path;      // per-iteration CSV (iter,residual,ratio) when set
};

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;  // X-norm of the iterate increment
  double ratio = 0.0;     // residual / previous residual, NaN when unreliable
};

// One inner solve's iteration trail plus the constants its contraction
// claim is measured against.
struct InnerLog {
  std::string method;
  bool j_zero = true;
  double m = 0.0;
  double M = 0.0;
  double rho = 0.0;
  double kappa = 0.0;
  int iterations = 0;
  double stat_residual = 0.0;  // scaled stationarity at exit
  double fp_residual = 0.0;    // ||u - project(u - rho grad)||_X at exit
  bool converged = false;
  std::vector<IterationRecord> records;

  // Max recorded ratio strictly after `skip` iterations; NaN entries skipped.
  double max_ratio_after(int skip) const;
};

struct Solution {
  Vec u;
  long inner_iterations = 0;
  int outer_iterations = 0;
  double final_residual = 0.0;
  // Outer consecutive-difference ratios ||eta_{k+1}-eta_k|| / ||eta_k-eta_{k-1}||.
  std::vector<double> contraction_estimates;
  bool converged = false;
  std::string method;
  std::vector<InnerLog> inner_logs;
};

double resolve_rho(const GalerkinProblem& p, const SolverParams& params);
double contraction_factor(const GalerkinProblem& p, const SolverParams& params);

// Projection onto the constraint set in the Gram metric: the minimizer of
// ||w - z||_X over K. Coincides with the componentwise clamp when the Gram
// is diagonal; otherwise a small box-QP solved to stationarity `tol`.
Vec metric_project(const GramInner& gx, const ConstraintSet& k, const Vec& z, double tol,
                   const Vec* warm = nullptr);

// Solves the VI with the friction bound frozen at eta:
//   u in K : (Au, v-u)_X + j(eta, v) - j(eta, u) >= (f, pi v - pi u)_Y.
// Returns u satisfying u = project(u - rho * grad_form(u)) within inner_tol.
// Throws NonConvergence when max_inner is exhausted (last iterate and the
// residual history ride on the exception).
Vec solve_vi_frozen(const GalerkinProblem& p, const Vec& eta, const SolverParams& params,
                    InnerLog* log = nullptr, const Vec* start = nullptr);

// Outer Banach iteration on the solution-dependent friction bound, started
// at eta0 (default: projection of 0 onto K). Problems whose j does not
// depend on the solution finish in one outer iteration.
Solution solve_qvi(const GalerkinProblem& p, const SolverParams& params,
                   const Vec* eta0 = nullptr);

// Max pairwise X-distance between solutions obtained from the given outer
// starting points. Propagates solver failures.
double uniqueness_check(const GalerkinProblem& p, const SolverParams& params,
                        const std::vector<Vec>& starts);

}  // namespace qvi
