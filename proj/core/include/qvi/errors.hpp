#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qvi {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  using Error::Error;
};

// Matrix handed to an SPD-only routine failed a symmetry or curvature check.
struct NotSpdError : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, int iters, double residual)
      : Error(what), iterations(iters), final_residual(residual) {}
  int iterations = 0;
  double final_residual = 0.0;
  // Last iterate and residual history, when the failing solver had them.
  std::vector<double> last_iterate;
  std::vector<double> residual_history;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qvi
