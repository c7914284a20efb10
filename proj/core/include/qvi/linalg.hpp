#pragma once

#include <cstdint>
#include <vector>

#include "qvi/errors.hpp"

namespace qvi {

// Dense coefficient vector. Entries must stay finite; API boundaries check.
using Vec = std::vector<double>;

bool all_finite(const Vec& v);
void check_finite(const Vec& v, const char* who);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
// y += alpha * x
void axpy(double alpha, const Vec& x, Vec& y);
Vec scaled(const Vec& x, double alpha);
Vec vsub(const Vec& a, const Vec& b);
Vec vadd(const Vec& a, const Vec& b);

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed sparse row matrix. Per-row column indices are strictly
// increasing; duplicate triplets are summed at construction.
struct SparseMat {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;   // size rows+1
  std::vector<int> col_idx;   // size nnz
  std::vector<double> vals;   // size nnz

  SparseMat() = default;

  static SparseMat from_triplets(int rows, int cols, std::vector<Triplet> ts);
  static SparseMat identity(int n);
  static SparseMat diagonal(const Vec& d);

  int nnz() const { return static_cast<int>(vals.size()); }
  bool empty() const { return rows == 0 && cols == 0; }

  Vec diagonal_values() const;  // missing diagonal entries read as 0
  SparseMat transpose() const;

  // Structural invariants: monotone row_ptr, sorted unique in-range columns.
  void check_layout() const;
};

Vec spmv(const SparseMat& m, const Vec& x);
// y = m^T x without forming the transpose.
Vec spmv_transpose(const SparseMat& m, const Vec& x);
// x^T (m y); m need not be square.
double bilinear(const SparseMat& m, const Vec& x, const Vec& y);
double sym_error(const SparseMat& m);  // max |a_ij - a_ji|

struct CgResult {
  Vec x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients for SPD systems. tol is relative
// to ||rhs||; throws NonConvergence after max_iter, NotSpdError on negative
// curvature. x0, when given, seeds the iteration (warm start).
CgResult cg_solve_full(const SparseMat& m, const Vec& rhs, double tol, int max_iter,
                       const Vec* x0 = nullptr);
Vec cg_solve(const SparseMat& m, const Vec& rhs, double tol, int max_iter);

// Symmetric positive definite Gram matrix defining an inner product.
// Construction checks symmetry (1e-12 relative) and certifies definiteness
// by CG convergence on seeded right-hand sides.
struct GramInner {
  SparseMat gram;

  GramInner() = default;
  explicit GramInner(SparseMat g, bool certify = true);

  int dim() const { return gram.rows; }
  double inner(const Vec& x, const Vec& y) const;
  double norm(const Vec& x) const;
  double dist(const Vec& x, const Vec& y) const;
  // Riesz representative: solves gram * z = functional.
  Vec riesz(const Vec& functional, double tol = 1e-13, const Vec* warm = nullptr) const;
};

double inner(const GramInner& g, const Vec& x, const Vec& y);

// Deterministic RNG used for sampling-based certification and multi-starts.
// xoshiro256++ seeded via splitmix64; sequences are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();                      // [0, 1)
  double uniform(double a, double b);    // [a, b)
  double normal();                       // Box-Muller, deterministic
  int uniform_int(int lo, int hi);       // inclusive range
  Vec vector(int n, double scale = 1.0); // iid normal entries
  std::uint64_t raw();

 private:
  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qvi
