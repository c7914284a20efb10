#pragma once

// Stationary heat conduction with a unilateral interior constraint.
//
// On a meshed domain with boundary parts 1/2/3: temperature u vanishes on
// part 1, is prescribed (u = b >= 0) on part 2, and part 3 carries an
// outward flux q. The temperature is constrained to stay non-negative
// throughout the domain, which turns the weak form into a variational
// inequality over
//   K = { v : v >= 0 in Omega, v = b on part 2 },  a(u,v) = int grad u . grad v,
//   (f, v)_Y = int f v  minus the part-3 flux term.
// The prescribed-temperature condition is the one relaxed by penalization:
// replacing it with the Robin-type exchange term (1/lambda) int_2 (u - b) v
// yields the penalized problem on K_tilde = { v >= 0 }, and lambda -> 0
// recovers the prescribed temperature (vanishing exchange resistance).
//
// Discretization: P1 elements, part-1 nodes eliminated. X carries the full
// H1 Gram (stiffness + mass); Y is the same dof set with the L2 (mass) Gram
// and the identity trace map, so c0 = 1 holds exactly. The operator is the
// stiffness alone: m = 1 / (1 + C_P) with C_P the discrete Poincare
// constant (certified by power iteration), M = 1 exactly.

#include <functional>

#include "qvi/control.hpp"
#include "qvi/mesh.hpp"
#include "qvi/penalty.hpp"

namespace qvi {

// Nodal samples over the full mesh; assembly restricts each field to the
// boundary part where it matters.
struct HeatData {
  Vec source;    // volumetric source f, per node
  Vec gamma2_b;  // prescribed temperature on part 2, per node, >= 0 there
  Vec gamma3_q;  // outward flux on part 3, per node
};

HeatData sample_heat_data(const Mesh2D& mesh,
                          const std::function<double(double, double)>& source,
                          const std::function<double(double, double)>& b,
                          const std::function<double(double, double)>& q);

struct HeatAssembly {
  GalerkinProblem problem;  // constrained instance on K
  PenaltySpec penalty;      // K_tilde plus the Robin exchange term on part 2
  SparseMat stiffness;      // free-dof stiffness (the operator's linear part)
  SparseMat mass;           // free-dof mass (the Y Gram)

  std::vector<int> free_of_node;        // node -> free dof index, -1 if eliminated
  std::vector<std::size_t> node_of_free;  // free dof -> node
  std::vector<int> gamma2_dofs;         // free dofs on part 2
  Vec gamma2_weights;                   // matching trapezoid edge weights
  Vec gamma2_values;                    // matching b values
  double poincare = 0.0;                // certified upper estimate of C_P

  // Lumped L2 gap on part 2: sqrt(sum_i w_i (u_i - b_i)^2). Measures how far
  // a penalized solution is from the prescribed temperature.
  double gamma2_gap(const Vec& u) const;
};

HeatAssembly assemble_heat(const Mesh2D& mesh, const HeatData& data);

// Complementarity defect of u against the problem's bounds, using the
// assembled residual covector r = B(u) - F (no friction term):
//   max over dofs of | min(u_i - lo_i, r_i) |, mirrored for upper bounds,
//   |r_i| where unconstrained, |u_i - pin_i| on pins.
// Zero at an exact solution of the bound-constrained problem.
double complementarity_check(const GalerkinProblem& p, const Vec& u);

// Control parametrization over the heat load: `count` piecewise-constant
// patches tiling the unit square (px-by-py blocks with px ~ sqrt(count)),
// restricted to the free dofs. box > 0 bounds every coefficient to
// [-box, box]; box = 0 leaves them unbounded.
ControlSpace patch_control_space(const Mesh2D& mesh, const HeatAssembly& ha, int count,
                                 double box);

// Tracking cost weight_g * ||u||_L2^2 + weight_h * ||f||_L2^2 on the heat
// dof space (observation = identity, target = 0, both forms mass-weighted).
SeparableCost heat_tracking_cost(const HeatAssembly& ha, double weight_g, double weight_h);

// Penalty sweep specialized to the heat instance: on top of the standard
// columns the table reports the part-2 temperature gap of every accepted
// row (extra column "gamma2_gap"), which must shrink along with lambda.
SweepResult robin_limit_experiment(const HeatAssembly& ha, const PenaltySchedule& sched,
                                   const SolverParams& params, int threads = 1);
SweepResult robin_limit_experiment(const Mesh2D& mesh, const HeatData& data,
                                   const PenaltySchedule& sched, const SolverParams& params,
                                   int threads = 1);

}  // namespace qvi
