#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "qvi/problem.hpp"

namespace qvi {

// Largest generalized eigenvalue sup_x (x' N x) / (x' G x) of a PSD form N
// against the SPD Gram G, by power iteration on G^{-1} N. apply_n must be
// self-adjoint PSD in the Euclidean pairing. The estimate approaches the
// true value from below; callers add safety margins when they need an
// upper-bound certificate.
double max_generalized_eigenvalue(const std::function<Vec(const Vec&)>& apply_n,
                                  const GramInner& gram, int iters = 120,
                                  std::uint64_t seed = 7);
double max_generalized_eigenvalue(const SparseMat& n_form, const GramInner& gram,
                                  int iters = 120, std::uint64_t seed = 7);

// Empirical certification of the structural hypotheses by deterministic
// sampling: strong monotonicity and Lipschitz continuity of A, the
// four-point and growth bounds for j, and the trace bound for pi. Sampled
// values are compared against the certified constants stored in p.
struct HypothesisReport {
  int samples = 0;
  // sampled
  double m_hat = 0.0;
  double M_hat = 0.0;
  double alpha_hat = 0.0;
  double gamma_hat = 0.0;
  double c0_hat = 0.0;
  // certified (copied from the problem)
  double m = 0.0;
  double M = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double c0 = 0.0;
  // verdicts
  bool monotonicity_ok = false;  // m_hat >= m - tol
  bool lipschitz_ok = false;     // M_hat <= M + tol
  bool fourpoint_ok = false;     // alpha_hat <= alpha + tol
  bool growth_ok = false;        // gamma_hat <= gamma + tol
  bool trace_ok = false;         // c0_hat <= c0 + tol
  bool smallness_ok = false;     // m > alpha and m > gamma
  bool consistent = false;       // all of the above

  std::string summary() const;
};

HypothesisReport validate_hypotheses(const GalerkinProblem& p, int samples, std::uint64_t seed);

}  // namespace qvi
