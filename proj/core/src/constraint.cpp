#include "qvi/constraint.hpp"

#include <algorithm>
#include <cmath>

namespace qvi {

ConstraintSet ConstraintSet::all_free(int dim) {
  ConstraintSet k;
  k.dim = dim;
  k.lower.assign(static_cast<std::size_t>(dim), -kInf);
  k.upper.assign(static_cast<std::size_t>(dim), kInf);
  k.pinned.assign(static_cast<std::size_t>(dim), 0);
  k.pin_value.assign(static_cast<std::size_t>(dim), 0.0);
  return k;
}

void ConstraintSet::set_lower(int dof, double v) {
  if (dof < 0 || dof >= dim) throw DimensionError("constraint: dof out of range");
  lower[dof] = v;
}

void ConstraintSet::set_upper(int dof, double v) {
  if (dof < 0 || dof >= dim) throw DimensionError("constraint: dof out of range");
  upper[dof] = v;
}

void ConstraintSet::set_pin(int dof, double v) {
  if (dof < 0 || dof >= dim) throw DimensionError("constraint: dof out of range");
  if (!std::isfinite(v)) throw Error("constraint: non-finite pin value");
  pinned[dof] = 1;
  pin_value[dof] = v;
}

Vec ConstraintSet::validate() const {
  if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim ||
      static_cast<int>(pinned.size()) != dim || static_cast<int>(pin_value.size()) != dim)
    throw DimensionError("constraint: inconsistent array sizes");
  for (int i = 0; i < dim; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i])) throw Error("constraint: NaN bound");
    if (lower[i] > upper[i]) throw Error("constraint: empty set, lower > upper at dof " + std::to_string(i));
    if (pinned[i] && (pin_value[i] < lower[i] || pin_value[i] > upper[i]))
      throw Error("constraint: empty set, pin outside bounds at dof " + std::to_string(i));
  }
  // Feasible point: pins exactly, zero clamped into bounds elsewhere.
  Vec p(static_cast<std::size_t>(dim), 0.0);
  return project(std::move(p));
}

Vec ConstraintSet::project(Vec v) const {
  if (static_cast<int>(v.size()) != dim) throw DimensionError("project: size mismatch");
  for (int i = 0; i < dim; ++i) {
    if (pinned[i]) {
      v[i] = pin_value[i];
    } else {
      v[i] = std::min(std::max(v[i], lower[i]), upper[i]);
    }
  }
  return v;
}

bool ConstraintSet::contains(const Vec& v, double tol) const {
  if (static_cast<int>(v.size()) != dim) throw DimensionError("contains: size mismatch");
  for (int i = 0; i < dim; ++i) {
    if (pinned[i]) {
      if (std::fabs(v[i] - pin_value[i]) > tol) return false;
    } else if (v[i] < lower[i] - tol || v[i] > upper[i] + tol) {
      return false;
    }
  }
  return true;
}

bool ConstraintSet::has_constraints() const {
  for (int i = 0; i < dim; ++i) {
    if (pinned[i] || lower[i] > -kInf || upper[i] < kInf) return true;
  }
  return false;
}

std::vector<std::pair<int, double>> ConstraintSet::lower_list() const {
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < dim; ++i)
    if (lower[i] > -kInf) out.emplace_back(i, lower[i]);
  return out;
}

std::vector<std::pair<int, double>> ConstraintSet::upper_list() const {
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < dim; ++i)
    if (upper[i] < kInf) out.emplace_back(i, upper[i]);
  return out;
}

std::vector<std::pair<int, double>> ConstraintSet::pin_list() const {
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < dim; ++i)
    if (pinned[i]) out.emplace_back(i, pin_value[i]);
  return out;
}

}  // namespace qvi
