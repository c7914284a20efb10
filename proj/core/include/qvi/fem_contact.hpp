#pragma once

// Plane-strain frictional contact with a compliant layer of bounded thickness.
//
// An elastic body is clamped on boundary part 1, loaded by surface tractions
// on part 2, and rests on a deformable layer of thickness k covering a rigid
// base along part 3. Penetration into the layer meets normal compliance
// pressure p(u_nu) = cp * max(u_nu, 0) but cannot exceed the layer thickness:
// u_nu <= k. Friction is Coulomb-type with the normal-compliance bound,
//   j(eta, v) = mu * int_3 p(eta_nu) |v_tau|,
// which makes the inequality quasivariational: the friction threshold
// depends on the solution itself.
//
// The unilateral bound is the condition relaxed by penalization: the layer
// is backed by a second, stiffer layer of thickness k_tilde - k with
// response (1/lambda) q(u_nu - k), q(r) = cq * max(r, 0). As lambda -> 0 the
// backing becomes rigid and the constraint u_nu <= k is recovered.
//
// Discretization: CST elements, interleaved (x,y) dofs, part-1 nodes fully
// clamped. X carries the strain Gram int eps(u):eps(v), so the Lame bounds
//   2 mu_L |eps|^2 <= F eps : eps,  |F eps| <= 2 (mu_L + lambda_L) |eps|
// give exact monotonicity/Lipschitz constants for the elastic part; the
// compliance term adds cp * d0^2 to M with d0 the certified discrete
// trace constant of part 3. On the bottom edge the outward normal is
// (0, -1), so u_nu = -u_y and the bound u_nu <= k reads u_y >= -k.

#include <array>

#include "qvi/control.hpp"
#include "qvi/mesh.hpp"
#include "qvi/penalty.hpp"

namespace qvi {

struct ElasticityData {
  double youngs = 1.0;
  double poisson = 0.3;
  double cp = 1.0;                  // normal compliance slope
  double cq = 1.0;                  // backing-layer penalty slope
  double mu = -1.0;                 // friction coefficient; < 0 -> auto
  double smallness_fraction = 0.5;  // target alpha/m when mu is auto
  double k = 0.05;                  // layer thickness (penetration bound)
  double k_tilde = 0.1;             // relaxed bound for the penalized problem
  std::array<double, 2> body_force{0.0, 0.0};
  std::array<double, 2> traction{0.0, -0.4};  // applied on part 2
  // Tracking cost L(u, f) = a0 |f_body|^2 + a2 |f_trac|^2
  //                       + a3 int_3 |u_nu - theta|^2.
  double theta = 0.02;
  double a0 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;
};

struct ContactAssembly {
  GalerkinProblem problem;  // QVI instance on K = { u_nu <= k on part 3 }
  PenaltySpec penalty;      // K_tilde plus the backing-layer term
  SparseMat stiffness;      // elastic linear part on free dofs
  SparseMat strain_gram;    // X Gram

  std::vector<int> base_of_node;        // node -> x dof (y dof = +1), -1 if clamped
  std::vector<std::size_t> node_of_pair;  // free pair -> node
  std::vector<std::size_t> contact_nodes;  // part-3 free nodes, ascending
  std::vector<int> contact_x;           // tangential dof per contact node
  std::vector<int> contact_y;           // normal-carrying dof per contact node
  Vec contact_weights;                  // part-3 trapezoid weights

  double d0_sq = 0.0;       // certified trace constant of part 3
  double mu = 0.0;          // resolved friction coefficient
  double mu_lame = 0.0;
  double lambda_lame = 0.0;

  double layer_k = 0.0;     // copied layer thickness

  // Control structure: Y = body force (all free dofs) + traction (part-2
  // dofs); the leading block has y_body_dim entries.
  int y_body_dim = 0;
  SeparableCost cost;       // tracking cost built from theta / a0 / a2 / a3

  Vec normal_gap(const Vec& u) const;        // u_nu = -u_y per contact node
  Vec tangential_slip(const Vec& u) const;   // u_x per contact node
  double penetration(const Vec& u) const;    // max(0, max_i (u_nu,i - k))
};

ContactAssembly assemble_contact(const Mesh2D& mesh, const ElasticityData& data,
                                 bool enforce_smallness = true);

// Element matrices exposed for verification against hand integration.
// Interleaved local dofs (u0x, u0y, u1x, u1y, u2x, u2y).
std::array<std::array<double, 6>, 6> cst_stiffness(const std::array<double, 2>& p0,
                                                   const std::array<double, 2>& p1,
                                                   const std::array<double, 2>& p2,
                                                   double youngs, double poisson);
std::array<std::array<double, 6>, 6> cst_strain_gram(const std::array<double, 2>& p0,
                                                     const std::array<double, 2>& p1,
                                                     const std::array<double, 2>& p2);
// Full elastic stiffness on all nodes (no clamping), for patch tests.
SparseMat full_elastic_stiffness(const Mesh2D& mesh, double youngs, double poisson);

// Largest ratio of consecutive outer-iteration differences; 0 when fewer
// than three outer iterates exist. Bounded by alpha/m for the contraction.
double coulomb_fixed_point_diagnostics(const Solution& s);

// Penalty sweep specialized to the contact instance: the extra column
// "penetration" reports how far each accepted row violates the layer
// thickness bound; it must vanish as lambda -> 0.
SweepResult layered_foundation_experiment(const ContactAssembly& ca,
                                          const PenaltySchedule& sched,
                                          const SolverParams& params, int threads = 1);
SweepResult layered_foundation_experiment(const Mesh2D& mesh, const ElasticityData& data,
                                          const PenaltySchedule& sched,
                                          const SolverParams& params, int threads = 1);

}  // namespace qvi
