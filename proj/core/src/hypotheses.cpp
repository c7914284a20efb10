#include "qvi/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qvi {

double max_generalized_eigenvalue(const std::function<Vec(const Vec&)>& apply_n,
                                  const GramInner& gram, int iters, std::uint64_t seed) {
  const int n = gram.dim();
  if (n == 0) return 0.0;
  Rng rng(seed);
  Vec x = rng.vector(n);
  double xn = gram.norm(x);
  if (xn == 0.0) return 0.0;
  for (double& v : x) v /= xn;
  double rayleigh = 0.0;
  Vec warm(static_cast<std::size_t>(n), 0.0);
  for (int it = 0; it < iters; ++it) {
    Vec nx = apply_n(x);
    double num = dot(x, nx);
    if (num <= 0.0) {
      // x is (numerically) in the kernel of N; restart from a fresh vector.
      x = rng.vector(n);
      xn = gram.norm(x);
      for (double& v : x) v /= xn;
      continue;
    }
    rayleigh = num;  // x is G-normalized
    Vec y = gram.riesz(nx, 1e-12, &warm);
    warm = y;
    double yn = gram.norm(y);
    if (yn == 0.0) break;
    for (double& v : y) v /= yn;
    x = std::move(y);
  }
  return rayleigh;
}

double max_generalized_eigenvalue(const SparseMat& n_form, const GramInner& gram, int iters,
                                  std::uint64_t seed) {
  return max_generalized_eigenvalue(
      [&n_form](const Vec& x) { return spmv(n_form, x); }, gram, iters, seed);
}

HypothesisReport validate_hypotheses(const GalerkinProblem& p, int samples, std::uint64_t seed) {
  if (samples < 2) throw Error("validate_hypotheses: need at least 2 samples");
  HypothesisReport rep;
  rep.samples = samples;
  rep.m = p.a.m;
  rep.M = p.a.M;
  rep.alpha = p.j.alpha;
  rep.beta = p.j.beta;
  rep.gamma = p.j.gamma;
  rep.c0 = p.c0;

  Rng rng(seed);
  const int n = p.dim();
  rep.m_hat = kInf;

  for (int s = 0; s < samples; ++s) {
    Vec u = rng.vector(n);
    Vec v = rng.vector(n);
    Vec d = vsub(u, v);
    double dn = p.inner_x.norm(d);
    if (dn < 1e-12) continue;
    Vec cov_diff = vsub(p.a.covector(u), p.a.covector(v));
    // (Au - Av, u - v)_X equals the Euclidean pairing of the assembled
    // difference with d.
    double mono = dot(cov_diff, d) / (dn * dn);
    rep.m_hat = std::min(rep.m_hat, mono);
    // ||Au - Av||_X via the Riesz representative of the covector difference.
    Vec r = p.inner_x.riesz(cov_diff, 1e-12);
    double lip = p.inner_x.norm(r) / dn;
    rep.M_hat = std::max(rep.M_hat, lip);

    // Trace bound on the same draws.
    double vn = p.inner_x.norm(u);
    if (vn > 1e-12) {
      Vec pu = spmv(p.pi.pi, u);
      rep.c0_hat = std::max(rep.c0_hat, p.inner_y.norm(pu) / vn);
    }
  }

  if (p.j.depends_on_eta()) {
    for (int s = 0; s < samples; ++s) {
      Vec e1 = rng.vector(n), e2 = rng.vector(n);
      Vec v1 = rng.vector(n), v2 = rng.vector(n);
      double en = p.inner_x.dist(e1, e2);
      double vn = p.inner_x.dist(v1, v2);
      if (en < 1e-12 || vn < 1e-12) continue;
      double four = p.j.eval(e1, v2, 0.0) - p.j.eval(e1, v1, 0.0) + p.j.eval(e2, v1, 0.0) -
                    p.j.eval(e2, v2, 0.0);
      rep.alpha_hat = std::max(rep.alpha_hat, four / (en * vn));
      double e1n = p.inner_x.norm(e1);
      if (e1n > 1e-12) {
        double growth = std::fabs(p.j.eval(e1, v1, 0.0) - p.j.eval(e1, v2, 0.0));
        rep.gamma_hat = std::max(rep.gamma_hat, growth / (e1n * vn));
      }
    }
  }
  if (rep.m_hat == kInf) rep.m_hat = 0.0;

  const double tol_m = 1e-9 * std::max(1.0, std::fabs(rep.m));
  const double tol_M = 1e-9 * std::max(1.0, std::fabs(rep.M));
  rep.monotonicity_ok = rep.m_hat >= rep.m - tol_m;
  rep.lipschitz_ok = rep.M_hat <= rep.M + tol_M;
  rep.fourpoint_ok = rep.alpha_hat <= rep.alpha + 1e-9 * std::max(1.0, rep.alpha);
  rep.growth_ok = rep.gamma_hat <= rep.beta + rep.gamma + 1e-9 * std::max(1.0, rep.gamma);
  rep.trace_ok = rep.c0_hat <= rep.c0 + 1e-9 * std::max(1.0, rep.c0);
  rep.smallness_ok = rep.m > rep.alpha && rep.m > rep.gamma;
  rep.consistent = rep.monotonicity_ok && rep.lipschitz_ok && rep.fourpoint_ok && rep.growth_ok &&
                   rep.trace_ok;
  return rep;
}

std::string HypothesisReport::summary() const {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "samples=%d\n"
                "m:     certified=%.6g sampled=%.6g %s\n"
                "M:     certified=%.6g sampled=%.6g %s\n"
                "alpha: certified=%.6g sampled=%.6g %s\n"
                "gamma: certified=%.6g sampled=%.6g %s\n"
                "c0:    certified=%.6g sampled=%.6g %s\n"
                "smallness (m > alpha and m > gamma): %s\n"
                "consistent: %s\n",
                samples, m, m_hat, monotonicity_ok ? "ok" : "VIOLATED", M, M_hat,
                lipschitz_ok ? "ok" : "VIOLATED", alpha, alpha_hat,
                fourpoint_ok ? "ok" : "VIOLATED", gamma, gamma_hat, growth_ok ? "ok" : "VIOLATED",
                c0, c0_hat, trace_ok ? "ok" : "VIOLATED", smallness_ok ? "ok" : "VIOLATED",
                consistent ? "yes" : "no");
  return std::string(buf);
}

}  // namespace qvi
