#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qvi/constraint.hpp"
#include "qvi/linalg.hpp"

namespace qvi {

// Nodal boundary term. Contributes
//   energy    weight * Phi(sign * u[dof] - offset)
//   covector  weight * sign * phi(sign * u[dof] - offset)   at `dof`
// with phi(r) = slope * max(r, 0) when one_sided (normal compliance /
// penetration penalty) and phi(r) = slope * r otherwise (affine gap).
// phi is monotone non-decreasing, so the term is a monotone operator.
struct NodalTerm {
  int dof = 0;
  double weight = 0.0;
  double sign = 1.0;
  double offset = 0.0;
  double slope = 1.0;
  bool one_sided = true;

  double value(double u) const;       // phi at this dof given dof value u
  double covector(double u) const;    // contribution at dof
  double energy(double u) const;      // primitive Phi
  double local_slope(double u) const; // d(covector)/du, piecewise
};

// Strongly monotone Lipschitz operator: sparse linear part plus monotone
// nodal boundary terms, with certified constants in the Gram metric:
//   (Au - Av, u - v)_X >= m ||u - v||_X^2,  ||Au - Av||_X <= M ||u - v||_X.
struct OperatorSpec {
  SparseMat linear;
  std::vector<NodalTerm> boundary;
  double m = 0.0;
  double M = 0.0;

  // Assembled (Euclidean covector) action: linear * u + boundary terms.
  Vec covector(const Vec& u) const;
  void add_covector(const Vec& u, Vec& into) const;
};

// Riesz representative of the operator action in the inner_x metric.
Vec apply_A(const OperatorSpec& a, const GramInner& inner_x, const Vec& u);

enum class FrictionKind { Zero, TrescaCoulomb };

// Solution-dependent friction functional
//   j(eta, v) = mu * sum_i w_i * p(eta_n,i) * (sqrt(v_t,i^2 + eps^2) - eps)
// with p(r) = p_slope * max(r, 0) and nodal normal/tangential dof pairs.
// The eps-smoothing keeps j(eta, 0) = 0 and preserves convexity and the
// four-point bound with the same constants.
struct FrictionNode {
  int normal_dof = 0;
  int tangent_dof = 0;
  double normal_sign = 1.0;  // eta_n = normal_sign * eta[normal_dof]
  double weight = 0.0;
};

struct FrictionFunctional {
  FrictionKind kind = FrictionKind::Zero;
  double mu = 0.0;
  double p_slope = 0.0;
  std::vector<FrictionNode> nodes;
  double eps = 1e-9;
  // Certified four-point / growth constants (beta enters the growth bound
  // j(eta, v1) - j(eta, v2) <= (beta + gamma ||eta||) ||v1 - v2||).
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  bool depends_on_eta() const { return kind != FrictionKind::Zero && mu != 0.0; }
  double bond(const Vec& eta, const FrictionNode& n) const;  // mu * w * p(eta_n)
  double eval(const Vec& eta, const Vec& v, double eps_override) const;
  double eval(const Vec& eta, const Vec& v) const { return eval(eta, v, eps); }
  // Gradient covector of the smoothed functional in v.
  void add_grad(const Vec& eta, const Vec& v, double eps_use, Vec& into) const;
};

double eval_j(const FrictionFunctional& j, const Vec& eta, const Vec& v);

// Linear continuous map pi : X -> Y with certified ||pi v||_Y <= c0 ||v||_X.
struct TraceMap {
  SparseMat pi;
  double c0 = 0.0;
};

// Finite-dimensional quasivariational inequality instance: find u in K with
//   (Au, v-u)_X + j(u, v) - j(u, u) >= (f, pi v - pi u)_Y  for all v in K.
// Construction validates the smallness conditions m > alpha, m > gamma and
// the structural invariants; make_unchecked skips smallness for diagnostics.
struct GalerkinProblem {
  GramInner inner_x;
  GramInner inner_y;
  OperatorSpec a;
  ConstraintSet k;
  FrictionFunctional j;
  TraceMap pi;
  Vec f;           // load in Y
  Vec extra_load;  // optional fixed Euclidean covector on X dofs
  double c0 = 0.0;
  bool smallness_ok = false;

  static GalerkinProblem make(GramInner inner_x, GramInner inner_y, OperatorSpec a,
                              ConstraintSet k, FrictionFunctional j, TraceMap pi, Vec f,
                              Vec extra_load = {});
  static GalerkinProblem make_unchecked(GramInner inner_x, GramInner inner_y, OperatorSpec a,
                                        ConstraintSet k, FrictionFunctional j, TraceMap pi,
                                        Vec f, Vec extra_load = {});

  int dim() const { return inner_x.dim(); }
  int ydim() const { return inner_y.dim(); }

  // Euclidean load covector: pi^T (Gy f) + extra_load.
  const Vec& load() const { return load_cov_; }
  GalerkinProblem with_load(Vec f_new) const;

  // Assembled residual covector B(u) - F, without the friction part.
  Vec residual_cov(const Vec& u) const;

 private:
  Vec load_cov_;
  static GalerkinProblem build(GramInner inner_x, GramInner inner_y, OperatorSpec a,
                               ConstraintSet k, FrictionFunctional j, TraceMap pi, Vec f,
                               Vec extra_load, bool enforce_smallness);
};

// VI residual of u against sampled directions: min over v of
//   (Au, v-u)_X + j(u, v) - j(u, u) - (f, pi v - pi u)_Y
// with directions projected into K first and j evaluated unsmoothed (eps = 0).
// Non-negative (up to tolerance) at a solution.
double vi_residual(const GalerkinProblem& p, const Vec& u, const std::vector<Vec>& directions);

}  // namespace qvi
