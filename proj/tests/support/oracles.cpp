#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "qvi/errors.hpp"

namespace testsup {

using qvi::ConstraintSet;
using qvi::Error;
using qvi::kInf;
using qvi::NodalTerm;
using qvi::SparseMat;

Dense dense_from(const SparseMat& m) {
  Dense a(static_cast<std::size_t>(m.rows), Vec(static_cast<std::size_t>(m.cols), 0.0));
  for (int i = 0; i < m.rows; ++i)
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(m.col_idx[k])] += m.vals[k];
  return a;
}

Dense dense_identity(int n) {
  Dense a(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  return a;
}

Vec dense_apply(const Dense& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec dense_solve(Dense a, Vec b) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  if (b.size() != n) throw Error("dense_solve: shape mismatch");
  double scale = 0.0;
  for (const Vec& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) throw Error("dense_solve: zero matrix");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) <= 1e-13 * scale) throw Error("dense_solve: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
    x[ri] = s / a[ri][ri];
  }
  return x;
}

namespace {

// Candidate verification: feasibility plus the KKT sign conditions with the
// true (piecewise) covector. Everything is measured in absolute terms against
// tol, with a mild scale factor from the data.
bool kkt_verified(const Dense& a, const std::vector<NodalTerm>& terms, const Vec& load,
                  const ConstraintSet& k, const Vec& u, double tol) {
  const std::size_t n = u.size();
  Vec r = dense_apply(a, u);
  for (const NodalTerm& t : terms) r[static_cast<std::size_t>(t.dof)] += t.covector(u[static_cast<std::size_t>(t.dof)]);
  for (std::size_t i = 0; i < n; ++i) r[i] -= load[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (k.pinned[i]) {
      if (std::fabs(u[i] - k.pin_value[i]) > tol) return false;
      continue;
    }
    if (u[i] < k.lower[i] - tol || u[i] > k.upper[i] + tol) return false;
    // Projected-gradient defect: zero iff the sign conditions hold.
    const double trial = std::min(std::max(u[i] - r[i], k.lower[i]), k.upper[i]);
    if (std::fabs(trial - u[i]) > tol) return false;
  }
  return true;
}

}  // namespace

std::optional<Vec> box_vi_oracle(const SparseMat& a, const std::vector<NodalTerm>& terms,
                                 const Vec& load, const ConstraintSet& k, double tol) {
  const int n = a.rows;
  if (a.cols != n || static_cast<int>(load.size()) != n || k.dim != n)
    throw Error("box_vi_oracle: shape mismatch");
  const Dense ad = dense_from(a);

  // Enumerable states per dof: 0 = interior, 1 = at lower, 2 = at upper.
  // Pinned dofs contribute a single fixed state.
  std::vector<std::vector<double>> fixed_choices(static_cast<std::size_t>(n));
  std::vector<int> radix(static_cast<std::size_t>(n), 1);
  for (int i = 0; i < n; ++i) {
    auto& ch = fixed_choices[static_cast<std::size_t>(i)];
    if (k.pinned[i]) {
      ch = {k.pin_value[i]};
    } else {
      ch = {0.0};  // placeholder for "interior"; value unused
      if (k.lower[i] > -kInf) ch.push_back(k.lower[i]);
      if (k.upper[i] < kInf) ch.push_back(k.upper[i]);
    }
    radix[static_cast<std::size_t>(i)] = static_cast<int>(ch.size());
  }
  // One-sided terms toggle between off and on; affine terms are always on.
  std::vector<int> toggle_terms;
  for (std::size_t t = 0; t < terms.size(); ++t)
    if (terms[t].one_sided && terms[t].weight * terms[t].slope != 0.0)
      toggle_terms.push_back(static_cast<int>(t));

  long long total = 1;
  for (int i = 0; i < n; ++i) total *= radix[static_cast<std::size_t>(i)];
  total <<= toggle_terms.size();
  if (total > 2'000'000) throw Error("box_vi_oracle: instance too large to enumerate");

  std::vector<int> state(static_cast<std::size_t>(n), 0);
  std::vector<char> on(terms.size(), 0);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int i = 0; i < n; ++i) {
      state[static_cast<std::size_t>(i)] = static_cast<int>(rem % radix[static_cast<std::size_t>(i)]);
      rem /= radix[static_cast<std::size_t>(i)];
    }
    std::fill(on.begin(), on.end(), 1);
    for (std::size_t b = 0; b < toggle_terms.size(); ++b)
      on[static_cast<std::size_t>(toggle_terms[b])] = static_cast<char>((rem >> b) & 1);

    // Free (interior) unknowns under this assignment.
    std::vector<int> free_ix;
    Vec fixed_val(static_cast<std::size_t>(n), 0.0);
    std::vector<char> is_free(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      if (!k.pinned[i] && state[static_cast<std::size_t>(i)] == 0) {
        is_free[static_cast<std::size_t>(i)] = 1;
        free_ix.push_back(i);
      } else {
        fixed_val[static_cast<std::size_t>(i)] =
            fixed_choices[static_cast<std::size_t>(i)][static_cast<std::size_t>(state[static_cast<std::size_t>(i)])];
      }
    }

    Vec u(static_cast<std::size_t>(n), 0.0);
    if (!free_ix.empty()) {
      const std::size_t m = free_ix.size();
      Dense sys(m, Vec(m, 0.0));
      Vec rhs(m, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        const int i = free_ix[r];
        rhs[r] = load[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
          const double aij = ad[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          if (aij == 0.0) continue;
          if (is_free[static_cast<std::size_t>(j)]) {
            const std::size_t c = static_cast<std::size_t>(
                std::lower_bound(free_ix.begin(), free_ix.end(), j) - free_ix.begin());
            sys[r][c] += aij;
          } else {
            rhs[r] -= aij * fixed_val[static_cast<std::size_t>(j)];
          }
        }
      }
      // Assumed-active terms on free dofs linearize to slope*weight on the
      // diagonal plus a constant moved to the right-hand side:
      //   w * sign * slope * (sign * u - offset) = w*slope*u - w*slope*sign*offset.
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const NodalTerm& tm = terms[t];
        if (!is_free[static_cast<std::size_t>(tm.dof)]) continue;
        const bool active = !tm.one_sided || on[t];
        if (!active) continue;
        const std::size_t r = static_cast<std::size_t>(
            std::lower_bound(free_ix.begin(), free_ix.end(), tm.dof) - free_ix.begin());
        sys[r][r] += tm.weight * tm.slope;
        rhs[r] += tm.weight * tm.slope * tm.sign * tm.offset;
      }
      Vec sol;
      try {
        sol = dense_solve(std::move(sys), std::move(rhs));
      } catch (const Error&) {
        continue;  // singular under this assignment; not the solution pattern
      }
      for (std::size_t r = 0; r < m; ++r) u[static_cast<std::size_t>(free_ix[r])] = sol[r];
    }
    for (int i = 0; i < n; ++i)
      if (!is_free[static_cast<std::size_t>(i)]) u[static_cast<std::size_t>(i)] = fixed_val[static_cast<std::size_t>(i)];

    if (kkt_verified(ad, terms, load, k, u, tol)) return u;
  }
  return std::nullopt;
}

namespace {

// Gradient of the P1 basis function that is 1 at vertex `which`: solve the
// Vandermonde system for the affine coefficients.
std::array<double, 2> p1_gradient(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                                  const std::array<double, 2>& p2, int which) {
  Dense vand = {{1.0, p0[0], p0[1]}, {1.0, p1[0], p1[1]}, {1.0, p2[0], p2[1]}};
  Vec e(3, 0.0);
  e[static_cast<std::size_t>(which)] = 1.0;
  Vec abc = dense_solve(std::move(vand), std::move(e));
  return {abc[1], abc[2]};
}

double tri_area_abs(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                    const std::array<double, 2>& p2) {
  return std::fabs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])) / 2.0;
}

}  // namespace

std::array<std::array<double, 3>, 3> p1_stiffness_oracle(const std::array<double, 2>& p0,
                                                         const std::array<double, 2>& p1,
                                                         const std::array<double, 2>& p2) {
  const double area = tri_area_abs(p0, p1, p2);
  std::array<std::array<double, 2>, 3> g = {p1_gradient(p0, p1, p2, 0), p1_gradient(p0, p1, p2, 1),
                                            p1_gradient(p0, p1, p2, 2)};
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          area * (g[static_cast<std::size_t>(i)][0] * g[static_cast<std::size_t>(j)][0] +
                  g[static_cast<std::size_t>(i)][1] * g[static_cast<std::size_t>(j)][1]);
  return k;
}

std::array<std::array<double, 3>, 3> p1_mass_oracle(const std::array<double, 2>& p0,
                                                    const std::array<double, 2>& p1,
                                                    const std::array<double, 2>& p2) {
  const double area = tri_area_abs(p0, p1, p2);
  // Edge-midpoint quadrature, exact for quadratics: at the midpoint opposite
  // vertex v the basis values are 1/2 everywhere except phi_v = 0.
  std::array<std::array<double, 3>, 3> m{};
  for (int q = 0; q < 3; ++q) {
    std::array<double, 3> phi{0.5, 0.5, 0.5};
    phi[static_cast<std::size_t>(q)] = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            (area / 3.0) * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
  }
  return m;
}

namespace {

// Voigt strain rows (exx, eyy, gxy) for the six interleaved CST dofs.
std::array<std::array<double, 6>, 3> cst_b_matrix(const std::array<double, 2>& p0,
                                                  const std::array<double, 2>& p1,
                                                  const std::array<double, 2>& p2) {
  std::array<std::array<double, 2>, 3> g = {p1_gradient(p0, p1, p2, 0), p1_gradient(p0, p1, p2, 1),
                                            p1_gradient(p0, p1, p2, 2)};
  std::array<std::array<double, 6>, 3> b{};
  for (int v = 0; v < 3; ++v) {
    const double gx = g[static_cast<std::size_t>(v)][0];
    const double gy = g[static_cast<std::size_t>(v)][1];
    b[0][static_cast<std::size_t>(2 * v)] = gx;      // exx from u_x
    b[1][static_cast<std::size_t>(2 * v + 1)] = gy;  // eyy from u_y
    b[2][static_cast<std::size_t>(2 * v)] = gy;      // gxy = du_x/dy + du_y/dx
    b[2][static_cast<std::size_t>(2 * v + 1)] = gx;
  }
  return b;
}

std::array<std::array<double, 6>, 6> cst_btdb(const std::array<std::array<double, 6>, 3>& b,
                                              const std::array<std::array<double, 3>, 3>& d,
                                              double area) {
  std::array<std::array<double, 6>, 6> k{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          s += b[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
               d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
               b[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = area * s;
    }
  return k;
}

}  // namespace

std::array<std::array<double, 6>, 6> cst_stiffness_oracle(const std::array<double, 2>& p0,
                                                          const std::array<double, 2>& p1,
                                                          const std::array<double, 2>& p2,
                                                          double youngs, double poisson) {
  const double f = youngs / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  std::array<std::array<double, 3>, 3> d{};
  d[0][0] = d[1][1] = f * (1.0 - poisson);
  d[0][1] = d[1][0] = f * poisson;
  d[2][2] = f * (1.0 - 2.0 * poisson) / 2.0;
  return cst_btdb(cst_b_matrix(p0, p1, p2), d, tri_area_abs(p0, p1, p2));
}

std::array<std::array<double, 6>, 6> cst_strain_gram_oracle(const std::array<double, 2>& p0,
                                                            const std::array<double, 2>& p1,
                                                            const std::array<double, 2>& p2) {
  // eps(u):eps(v) = exx exx' + eyy eyy' + gxy gxy' / 2 in engineering shear.
  std::array<std::array<double, 3>, 3> d{};
  d[0][0] = d[1][1] = 1.0;
  d[2][2] = 0.5;
  return cst_btdb(cst_b_matrix(p0, p1, p2), d, tri_area_abs(p0, p1, p2));
}

LatticePoint lattice_min(const std::function<double(double, double)>& fn, double lo0, double hi0,
                         double lo1, double hi1, int n) {
  LatticePoint best;
  bool have = false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double c0 = lo0 + (hi0 - lo0) * i / (n - 1);
      const double c1 = lo1 + (hi1 - lo1) * j / (n - 1);
      const double c = fn(c0, c1);
      if (!have || c < best.cost) {
        best = {c0, c1, c};
        have = true;
      }
    }
  return best;
}

}  // namespace testsup
