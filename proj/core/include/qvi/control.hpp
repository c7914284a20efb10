#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qvi/penalty.hpp"
#include "qvi/solvers.hpp"

namespace qvi {

// Separable cost L(u, f) = g(u) + h(f) with
//   g(u) = (O u - target)' Wg (O u - target)   (state tracking, >= 0)
//   h(f) = f' H f                              (control energy, coercive)
// Weight factors are folded into Wg and H.
struct SeparableCost {
  SparseMat obs;     // O : X -> observation space
  Vec target;
  SparseMat wg;      // PSD weight form on the observation space
  SparseMat h;       // PD form on Y

  void validate(int xdim, int ydim) const;
  double g_of(const Vec& u) const;
  double h_of(const Vec& f) const;
  double total(const Vec& u, const Vec& f) const { return g_of(u) + h_of(f); }
  SeparableCost scaled(double g_factor, double h_factor, Vec new_target) const;
};

// Finite-dimensional control parametrization: f(c) = sum_j c_j basis_j,
// with optional per-coefficient box bounds.
struct ControlSpace {
  std::vector<Vec> basis;
  std::vector<std::pair<double, double>> box;  // empty -> unbounded

  int dim() const { return static_cast<int>(basis.size()); }
  void validate(int ydim) const;
  Vec combine(const std::vector<double>& coeffs) const;
  std::vector<double> clamp(std::vector<double> coeffs) const;
};

struct OptimizerParams {
  double step0 = 0.25;
  double shrink = 0.5;
  double step_tol = 1e-7;
  int max_evals = 40000;
};

struct TracePoint {
  int eval = 0;
  double best_cost = 0.0;
  std::vector<double> coeffs;
};

struct OptimalPair {
  Vec u;
  Vec f;
  double cost = 0.0;
  std::vector<double> coeffs;
  int evaluations = 0;
  std::vector<TracePoint> trace;  // best-so-far, non-increasing
};

// g(S(f)) + h(f) where S(f) solves the state problem with load f.
// state_io, when non-null, warm-starts the solve (if non-empty) and receives
// the state solution; evaluation sequences stay deterministic either way.
double reduced_cost(const GalerkinProblem& p, const SeparableCost& cost, const Vec& f,
                    const SolverParams& params, Vec* state_io = nullptr);

// Multi-start coordinate search with shrinking steps over basis
// coefficients. Deterministic given seed; exact cost ties break on
// lexicographic coefficient order. warm, when given, is used as the first
// start (the remaining `starts` come from the seed).
OptimalPair optimize_control(const GalerkinProblem& p, const SeparableCost& cost,
                             const ControlSpace& space, int starts, std::uint64_t seed,
                             const SolverParams& params, const OptimizerParams& opt = {},
                             int threads = 1,
                             const std::vector<double>* warm = nullptr);

struct PairSweepRow {
  double lambda = 0.0;
  OptimalPair pair;
  double cost_gap = 0.0;     // |L_n(u_n*, f_n*) - L(u*, f*)|
  double control_dist = 0.0; // ||f_n* - f*||_Y
  bool ok = false;
};

struct PairSweepResult {
  std::vector<PairSweepRow> rows;
  OptimalPair reference;  // optimum of the unpenalized limit problem
};

// For each penalty level solves the perturbed optimal-control problem with
// cost cost_seq[n] on the penalized state problem, then compares against
// the unpenalized optimum under cost_limit. Row n warm-starts its search
// from row n-1's best coefficients.
PairSweepResult optimal_pair_sweep(const GalerkinProblem& p, const PenaltySpec& pen,
                                   const PenaltySchedule& sched,
                                   const std::vector<SeparableCost>& cost_seq,
                                   const SeparableCost& cost_limit, const ControlSpace& space,
                                   int starts, std::uint64_t seed, const SolverParams& params,
                                   const OptimizerParams& opt = {}, int threads = 1);

}  // namespace qvi
