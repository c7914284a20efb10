#pragma once

// Triangulated 2D domains with labeled boundary edges.
//
// Labels partition the boundary into three disjoint pieces:
//   1 = Dirichlet part (essential conditions, must be non-empty),
//   2 = flux / traction part,
//   3 = obstacle / contact part.
// The assembly routines in fem_heat / fem_contact give the labels their
// concrete meaning; the mesh itself only stores geometry and labels.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace qvi {

struct BoundaryEdge {
  std::size_t a = 0;  // node indices, oriented so the domain is on the left
  std::size_t b = 0;
  int label = 0;
};

struct Mesh2D {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<std::size_t, 3>> tris;  // CCW orientation
  std::vector<BoundaryEdge> boundary;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t tri_count() const { return tris.size(); }

  // Signed area of triangle t (positive for CCW).
  double tri_area(std::size_t t) const;

  // Nodes carrying at least one boundary edge with the given label,
  // sorted ascending, without duplicates.
  std::vector<std::size_t> boundary_nodes(int label) const;

  // Sum of edge lengths with the given label.
  double boundary_length(int label) const;

  // Trapezoid-rule weights per node for integrating over the edges with
  // the given label: w[i] = half the total length of label edges touching
  // node i.  Returned in the same order as boundary_nodes(label).
  std::vector<double> boundary_weights(int label) const;

  // Throws Error if the mesh is unusable: empty, indices out of range,
  // non-positive triangle areas, boundary edges not matching the triangulation
  // edge set, labels outside {1,2,3}, interior edges marked as boundary,
  // actual boundary edges missing a label, or no label-1 edge at all.
  void validate() const;
};

// Uniform triangulation of [0,1]^2 with nx-by-ny cells split along the
// main diagonal.  Labels: x=0 -> 1, x=1 -> 2, y=0 and y=1 -> 3.
Mesh2D unit_square(std::size_t nx, std::size_t ny);

// Uniform triangulation of [0,width]x[0,height].  Labels: x=0 -> 1,
// top (y=height) and right (x=width) -> 2, bottom (y=0) -> 3.
Mesh2D rectangle(double width, double height, std::size_t nx, std::size_t ny);

// P1 element matrices on a single triangle, exposed so tests can compare
// against hand-integrated values.
// Stiffness: K_ij = area * grad(phi_i) . grad(phi_j).
std::array<std::array<double, 3>, 3> p1_stiffness(const std::array<double, 2>& p0,
                                                  const std::array<double, 2>& p1,
                                                  const std::array<double, 2>& p2);
// Mass: M_ij = area/12 * (1 + delta_ij).
std::array<std::array<double, 3>, 3> p1_mass(const std::array<double, 2>& p0,
                                             const std::array<double, 2>& p1,
                                             const std::array<double, 2>& p2);

}  // namespace qvi
