#pragma once

#include <string>
#include <vector>

#include "qvi/solvers.hpp"

namespace qvi {

// Monotone Lipschitz penalty operator vanishing on K, as a sum of nodal
// gap terms: G(u)_i = weight * sign * phi(sign * u_i - offset). lipschitz
// is the certified Lipschitz constant of the Riesz action in the X norm.
struct PenaltyOperator {
  std::vector<NodalTerm> terms;
  double lipschitz = 0.0;

  Vec covector(const Vec& u) const;
};

// Enlarged constraint set K_tilde containing K, plus the penalty operator
// selecting K inside K_tilde (G u = 0 iff the K-defining gap vanishes).
struct PenaltySpec {
  ConstraintSet k_tilde;
  PenaltyOperator g;
};

// Strictly decreasing penalty levels lambda_n = lambda0 * ratio^n.
struct PenaltySchedule {
  double lambda0 = 1.0;
  double ratio = 0.25;
  int count = 8;

  void validate() const;
  std::vector<double> levels() const;
};

struct SweepRow {
  double lambda = 0.0;
  double distance_x = 0.0;   // ||u_n - u_ref||_X
  double violation = 0.0;    // weighted constraint gap of u_n
  long inner_iters = 0;
  int outer_iters = 0;
  double seconds = 0.0;
  bool ok = false;
  double sign_check = 0.0;   // (G u_n, u_ref - u_n) Euclidean pairing, <= 0
  double extra = 0.0;        // experiment-specific column (see extra_name)
};

struct ConvergenceTable {
  std::vector<SweepRow> rows;
  std::string extra_name;  // empty -> no extra column

  // Header: lambda,distance_X,violation,inner_iters,outer_iters,seconds
  // (plus the extra column when named). zero_seconds replaces measured
  // wall time with 0 for byte-reproducible output.
  std::string to_csv(bool zero_seconds = false) const;
};

// Penalized instance: A + (1/lambda) G on K_tilde, same m, M grown by
// lipschitz / lambda, j and loads unchanged.
GalerkinProblem penalized_problem(const GalerkinProblem& p, const PenaltySpec& pen,
                                  double lambda);

Solution solve_penalized(const GalerkinProblem& p, const PenaltySpec& pen, double lambda,
                         const SolverParams& params, const Vec* start = nullptr);

// Weighted L2 norm of the K-defining constraint gap at u.
double violation(const PenaltySpec& pen, const Vec& u);

struct SweepResult {
  ConvergenceTable table;
  Vec u_ref;
  Solution ref_solution;
  std::vector<Solution> solutions;  // per row, aligned with table.rows
};

// Solves the penalized problem along the schedule and tabulates distance to
// the direct K-constrained reference solve. f_seq, when given, supplies a
// per-row load (norm-convergent perturbation); the reference always uses
// the problem's own load. Rows run sequentially with warm starts, or
// cold-started in parallel when threads > 1. A failed row is marked and the
// sweep continues.
SweepResult penalty_sweep(const GalerkinProblem& p, const PenaltySpec& pen,
                          const PenaltySchedule& sched, const std::vector<Vec>* f_seq,
                          const SolverParams& params, int threads = 1);

}  // namespace qvi
