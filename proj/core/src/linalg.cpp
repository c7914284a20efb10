#include "qvi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qvi {

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_finite(const Vec& v, const char* who) {
  if (!all_finite(v)) throw Error(std::string(who) + ": non-finite entry");
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw DimensionError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec scaled(const Vec& x, double alpha) {
  Vec r(x);
  for (double& v : r) v *= alpha;
  return r;
}

Vec vsub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("vsub: size mismatch");
  Vec r(a);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

Vec vadd(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("vadd: size mismatch");
  Vec r(a);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

SparseMat SparseMat::from_triplets(int rows, int cols, std::vector<Triplet> ts) {
  if (rows < 0 || cols < 0) throw DimensionError("from_triplets: negative dimension");
  for (const Triplet& t : ts) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("from_triplets: index out of range");
    if (!std::isfinite(t.value)) throw Error("from_triplets: non-finite value");
  }
  // Stable sort keeps duplicate accumulation order deterministic, so the
  // assembled bit pattern is reproducible for identical input.
  std::stable_sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMat m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_idx.reserve(ts.size());
  m.vals.reserve(ts.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    while (i < ts.size() && ts[i].row == r) {
      int c = ts[i].col;
      double v = 0.0;
      while (i < ts.size() && ts[i].row == r && ts[i].col == c) {
        v += ts[i].value;
        ++i;
      }
      m.col_idx.push_back(c);
      m.vals.push_back(v);
    }
    m.row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_idx.size());
  }
  return m;
}

SparseMat SparseMat::identity(int n) {
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ts.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(ts));
}

SparseMat SparseMat::diagonal(const Vec& d) {
  std::vector<Triplet> ts;
  ts.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    ts.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), std::move(ts));
}

Vec SparseMat::diagonal_values() const {
  Vec d(static_cast<std::size_t>(std::min(rows, cols)), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] == r) d[r] = vals[k];
    }
  }
  return d;
}

SparseMat SparseMat::transpose() const {
  std::vector<Triplet> ts;
  ts.reserve(vals.size());
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      ts.push_back({col_idx[k], r, vals[k]});
    }
  }
  return from_triplets(cols, rows, std::move(ts));
}

void SparseMat::check_layout() const {
  if (static_cast<int>(row_ptr.size()) != rows + 1) throw Error("csr: bad row_ptr size");
  if (row_ptr.front() != 0 || row_ptr.back() != nnz()) throw Error("csr: bad row_ptr range");
  for (int r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw Error("csr: row_ptr not monotone");
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= cols) throw Error("csr: column out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) throw Error("csr: row not sorted");
      if (!std::isfinite(vals[k])) throw Error("csr: non-finite value");
    }
  }
}

Vec spmv(const SparseMat& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.cols) throw DimensionError("spmv: size mismatch");
  Vec y(static_cast<std::size_t>(m.rows), 0.0);
  for (int r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) s += m.vals[k] * x[m.col_idx[k]];
    y[r] = s;
  }
  return y;
}

Vec spmv_transpose(const SparseMat& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.rows) throw DimensionError("spmv_transpose: size mismatch");
  Vec y(static_cast<std::size_t>(m.cols), 0.0);
  for (int r = 0; r < m.rows; ++r) {
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) y[m.col_idx[k]] += m.vals[k] * x[r];
  }
  return y;
}

double bilinear(const SparseMat& m, const Vec& x, const Vec& y) {
  if (static_cast<int>(x.size()) != m.rows) throw DimensionError("bilinear: x size mismatch");
  return dot(x, spmv(m, y));
}

double sym_error(const SparseMat& m) {
  if (m.rows != m.cols) throw DimensionError("sym_error: not square");
  SparseMat t = m.transpose();
  double e = 0.0;
  // Both matrices share sorted layout; walk rows in parallel.
  for (int r = 0; r < m.rows; ++r) {
    int ka = m.row_ptr[r], kb = t.row_ptr[r];
    while (ka < m.row_ptr[r + 1] || kb < t.row_ptr[r + 1]) {
      int ca = ka < m.row_ptr[r + 1] ? m.col_idx[ka] : m.cols;
      int cb = kb < t.row_ptr[r + 1] ? t.col_idx[kb] : m.cols;
      if (ca == cb) {
        e = std::max(e, std::fabs(m.vals[ka] - t.vals[kb]));
        ++ka;
        ++kb;
      } else if (ca < cb) {
        e = std::max(e, std::fabs(m.vals[ka]));
        ++ka;
      } else {
        e = std::max(e, std::fabs(t.vals[kb]));
        ++kb;
      }
    }
  }
  return e;
}

CgResult cg_solve_full(const SparseMat& m, const Vec& rhs, double tol, int max_iter,
                       const Vec* x0) {
  if (m.rows != m.cols) throw DimensionError("cg_solve: matrix not square");
  if (static_cast<int>(rhs.size()) != m.rows) throw DimensionError("cg_solve: rhs size mismatch");
  const int n = m.rows;
  Vec inv_diag = m.diagonal_values();
  for (double& d : inv_diag) {
    if (d <= 0.0) throw NotSpdError("cg_solve: non-positive diagonal");
    d = 1.0 / d;
  }
  CgResult out;
  out.x = x0 ? *x0 : Vec(static_cast<std::size_t>(n), 0.0);
  double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    out.x.assign(static_cast<std::size_t>(n), 0.0);
    return out;
  }
  Vec r = vsub(rhs, spmv(m, out.x));
  Vec z(r);
  for (int i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
  Vec p(z);
  double rz = dot(r, z);
  double rnorm = norm2(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rnorm <= tol * bnorm) {
      out.relative_residual = rnorm / bnorm;
      return out;
    }
    Vec ap = spmv(m, p);
    double pap = dot(p, ap);
    if (pap <= 0.0) throw NotSpdError("cg_solve: negative curvature direction");
    double alpha = rz / pap;
    axpy(alpha, p, out.x);
    axpy(-alpha, ap, r);
    for (int i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    out.iterations = it + 1;
  }
  if (rnorm <= tol * bnorm) {
    out.relative_residual = rnorm / bnorm;
    return out;
  }
  NonConvergence err("cg_solve: no convergence in " + std::to_string(max_iter) +
                         " iterations, relative residual " + std::to_string(rnorm / bnorm),
                     max_iter, rnorm / bnorm);
  err.last_iterate = out.x;
  throw err;
}

Vec cg_solve(const SparseMat& m, const Vec& rhs, double tol, int max_iter) {
  return cg_solve_full(m, rhs, tol, max_iter).x;
}

GramInner::GramInner(SparseMat g, bool certify) : gram(std::move(g)) {
  gram.check_layout();
  if (gram.rows != gram.cols) throw DimensionError("gram: not square");
  if (certify && gram.rows > 0) {
    double scale = 0.0;
    for (double v : gram.vals) scale = std::max(scale, std::fabs(v));
    if (sym_error(gram) > 1e-12 * std::max(scale, 1.0))
      throw NotSpdError("gram: symmetry check failed");
    // Definiteness certificate: Jacobi-CG must converge on seeded rhs.
    Rng rng(0x9e3779b97f4a7c15ull);
    for (int trial = 0; trial < 2; ++trial) {
      Vec b = rng.vector(gram.rows);
      cg_solve(gram, b, 1e-10, 20 * gram.rows + 200);
    }
  }
}

double GramInner::inner(const Vec& x, const Vec& y) const {
  if (static_cast<int>(x.size()) != dim() || static_cast<int>(y.size()) != dim())
    throw DimensionError("gram inner: size mismatch");
  return dot(x, spmv(gram, y));
}

double GramInner::norm(const Vec& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

double GramInner::dist(const Vec& x, const Vec& y) const { return norm(vsub(x, y)); }

Vec GramInner::riesz(const Vec& functional, double tol, const Vec* warm) const {
  return cg_solve_full(gram, functional, tol, 40 * dim() + 400, warm).x;
}

double inner(const GramInner& g, const Vec& x, const Vec& y) { return g.inner(x, y); }

namespace {
std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::raw() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 1e-300);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw Error("uniform_int: empty range");
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(raw() % span);
}

Vec Rng::vector(int n, double scale) {
  Vec v(static_cast<std::size_t>(n));
  for (double& x : v) x = scale * normal();
  return v;
}

}  // namespace qvi
