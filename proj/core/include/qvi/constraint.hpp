#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "qvi/linalg.hpp"

namespace qvi {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed convex constraint set built from per-dof bounds and equality pins.
// Projection is componentwise clamping in the Euclidean dof metric: for FEM
// bound/pin constraints this coincides with nodal interpolation of the
// continuous projection.
struct ConstraintSet {
  int dim = 0;
  Vec lower;        // -inf where absent
  Vec upper;        // +inf where absent
  std::vector<char> pinned;
  Vec pin_value;    // meaningful where pinned

  ConstraintSet() = default;
  static ConstraintSet all_free(int dim);

  void set_lower(int dof, double v);
  void set_upper(int dof, double v);
  void set_pin(int dof, double v);

  // Checks lower <= upper, pins inside bounds, finiteness of pin values;
  // throws if the represented set is empty. Returns a feasible point.
  Vec validate() const;

  Vec project(Vec v) const;
  bool contains(const Vec& v, double tol) const;
  bool has_constraints() const;

  // Sparse views used by serialization.
  std::vector<std::pair<int, double>> lower_list() const;
  std::vector<std::pair<int, double>> upper_list() const;
  std::vector<std::pair<int, double>> pin_list() const;
};

}  // namespace qvi
