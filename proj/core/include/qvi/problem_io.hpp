#pragma once

// JSON serialization for meshes and assembled problem instances.
//
// Both formats are versioned structured text:
//   mesh    { "format": "qvi-mesh",    "version": 1, nodes/tris/boundary }
//   problem { "format": "qvi-problem", "version": 1, grams/operator/
//             constraints/friction/trace/loads, optional penalty block }
// Sparse matrices are stored in CSR form; constraint sets store only the
// finitely-bounded entries. Loading re-runs full construction validation.

#include <string>

#include "qvi/mesh.hpp"
#include "qvi/penalty.hpp"

namespace qvi {

void save_mesh(const std::string& path, const Mesh2D& mesh);
Mesh2D load_mesh(const std::string& path);

// pen, when non-null, rides along in a "penalty" block.
void save_problem(const std::string& path, const GalerkinProblem& p,
                  const PenaltySpec* pen = nullptr);
// Throws ConfigError on malformed input. When pen is non-null and the file
// carries a penalty block it is loaded into *pen (cleared otherwise).
GalerkinProblem load_problem(const std::string& path, PenaltySpec* pen = nullptr);

// Shared CSV float formatting: %.12g, round-trips doubles of interest.
std::string csv_double(double v);

}  // namespace qvi
