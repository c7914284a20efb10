#include "qvi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qvi/errors.hpp"

namespace qvi {

namespace {

double signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double edge_length(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

}  // namespace

double Mesh2D::tri_area(std::size_t t) const {
  const auto& tri = tris.at(t);
  return signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

std::vector<std::size_t> Mesh2D::boundary_nodes(int label) const {
  std::set<std::size_t> s;
  for (const auto& e : boundary) {
    if (e.label == label) {
      s.insert(e.a);
      s.insert(e.b);
    }
  }
  return std::vector<std::size_t>(s.begin(), s.end());
}

double Mesh2D::boundary_length(int label) const {
  double len = 0.0;
  for (const auto& e : boundary) {
    if (e.label == label) len += edge_length(nodes[e.a], nodes[e.b]);
  }
  return len;
}

std::vector<double> Mesh2D::boundary_weights(int label) const {
  std::map<std::size_t, double> w;
  for (const auto& e : boundary) {
    if (e.label != label) continue;
    const double half = 0.5 * edge_length(nodes[e.a], nodes[e.b]);
    w[e.a] += half;
    w[e.b] += half;
  }
  std::vector<double> out;
  out.reserve(w.size());
  for (const auto& [node, weight] : w) {
    (void)node;
    out.push_back(weight);
  }
  return out;
}

void Mesh2D::validate() const {
  if (nodes.empty() || tris.empty()) throw Error("mesh: empty node or triangle list");
  const std::size_t n = nodes.size();
  for (const auto& tri : tris) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (tri[k] >= n) throw Error("mesh: triangle node index out of range");
    }
    if (signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) <= 0.0)
      throw Error("mesh: triangle with non-positive area (need CCW orientation)");
  }

  // Count undirected edge usage: boundary edges belong to exactly one triangle.
  std::map<std::pair<std::size_t, std::size_t>, int> use;
  for (const auto& tri : tris) {
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      use[{a, b}] += 1;
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> labeled;
  bool has_dirichlet = false;
  for (const auto& e : boundary) {
    if (e.a >= n || e.b >= n) throw Error("mesh: boundary edge node index out of range");
    if (e.label < 1 || e.label > 3) throw Error("mesh: boundary label must be 1, 2 or 3");
    if (e.label == 1) has_dirichlet = true;
    std::size_t a = e.a, b = e.b;
    if (a > b) std::swap(a, b);
    auto it = use.find({a, b});
    if (it == use.end()) throw Error("mesh: boundary edge not present in triangulation");
    if (it->second != 1) throw Error("mesh: labeled edge is interior to the triangulation");
    if (!labeled.insert({a, b}).second) throw Error("mesh: boundary edge labeled twice");
  }
  for (const auto& [edge, count] : use) {
    if (count == 1 && labeled.find(edge) == labeled.end())
      throw Error("mesh: boundary edge without a label");
    if (count > 2) throw Error("mesh: non-manifold edge");
  }
  if (!has_dirichlet) throw Error("mesh: no Dirichlet (label 1) boundary part");
}

namespace {

// Shared structured-grid builder; the label_of callback assigns a label to a
// boundary edge given the midpoint of that edge.
template <typename LabelFn>
Mesh2D structured_grid(double width, double height, std::size_t nx, std::size_t ny,
                       LabelFn label_of) {
  if (nx == 0 || ny == 0) throw Error("mesh: need at least one cell per direction");
  if (!(width > 0.0) || !(height > 0.0)) throw Error("mesh: non-positive extent");
  Mesh2D m;
  const std::size_t cols = nx + 1;
  m.nodes.reserve(cols * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      m.nodes.push_back({width * static_cast<double>(i) / static_cast<double>(nx),
                         height * static_cast<double>(j) / static_cast<double>(ny)});
    }
  }
  auto id = [cols](std::size_t i, std::size_t j) { return j * cols + i; };
  m.tris.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t v00 = id(i, j), v10 = id(i + 1, j);
      const std::size_t v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      m.tris.push_back({v00, v10, v11});
      m.tris.push_back({v00, v11, v01});
    }
  }
  auto add_edge = [&](std::size_t a, std::size_t b) {
    const double mx = 0.5 * (m.nodes[a][0] + m.nodes[b][0]);
    const double my = 0.5 * (m.nodes[a][1] + m.nodes[b][1]);
    m.boundary.push_back({a, b, label_of(mx, my)});
  };
  for (std::size_t i = 0; i < nx; ++i) {
    add_edge(id(i, 0), id(i + 1, 0));        // bottom
    add_edge(id(i + 1, ny), id(i, ny));      // top
  }
  for (std::size_t j = 0; j < ny; ++j) {
    add_edge(id(0, j + 1), id(0, j));        // left
    add_edge(id(nx, j), id(nx, j + 1));      // right
  }
  m.validate();
  return m;
}

}  // namespace

Mesh2D unit_square(std::size_t nx, std::size_t ny) {
  return structured_grid(1.0, 1.0, nx, ny, [](double mx, double my) {
    if (mx < 1e-12) return 1;
    if (mx > 1.0 - 1e-12) return 2;
    (void)my;
    return 3;  // y = 0 and y = 1
  });
}

Mesh2D rectangle(double width, double height, std::size_t nx, std::size_t ny) {
  return structured_grid(width, height, nx, ny, [width, height](double mx, double my) {
    if (my < 1e-12) return 3;                       // bottom: contact
    if (mx < 1e-12) return 1;                       // left: clamped
    if (mx > width - 1e-12 || my > height - 1e-12) return 2;  // right + top: traction
    return 2;
  });
}

std::array<std::array<double, 3>, 3> p1_stiffness(const std::array<double, 2>& p0,
                                                  const std::array<double, 2>& p1,
                                                  const std::array<double, 2>& p2) {
  const double area = signed_area(p0, p1, p2);
  if (area <= 0.0) throw Error("p1_stiffness: non-positive area");
  // Constant gradients of the barycentric basis functions.
  const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
  const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
  std::array<std::array<double, 3>, 3> K{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
  return K;
}

std::array<std::array<double, 3>, 3> p1_mass(const std::array<double, 2>& p0,
                                             const std::array<double, 2>& p1,
                                             const std::array<double, 2>& p2) {
  const double area = signed_area(p0, p1, p2);
  if (area <= 0.0) throw Error("p1_mass: non-positive area");
  std::array<std::array<double, 3>, 3> M{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  return M;
}

}  // namespace qvi
