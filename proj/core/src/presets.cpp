#include "qvi/experiment.hpp"

namespace qvi {

namespace {

struct Preset {
  const char* name;
  const char* text;
};

// Catalog of builtin experiments. Each entry is a complete config; the CLI
// treats presets and config files identically after parsing.
const Preset kPresets[] = {
    {"heat-trivial",
     "# All-zero data: the constrained solution is 0 and every penalized row\n"
     "# reproduces it exactly, so all sweep distances vanish.\n"
     "[experiment]\n"
     "kind = heat-sweep\n"
     "name = heat-trivial\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 8\n"
     "[heat]\n"
     "source_const = 0\n"
     "b_const = 0\n"
     "q_const = 0\n"
     "[penalty]\n"
     "lambda0 = 1\n"
     "ratio = 0.25\n"
     "count = 4\n"
     "[run]\n"
     "save_problem = true\n"},

    {"heat-robin-sweep",
     "# Prescribed temperature b = 1 on the right edge approached through the\n"
     "# exchange (Robin) penalty; a cooling interior source activates the\n"
     "# non-negativity constraint on part of the domain.\n"
     "[experiment]\n"
     "kind = heat-sweep\n"
     "name = heat-robin-sweep\n"
     "[mesh]\n"
     "nx = 16\n"
     "ny = 16\n"
     "[heat]\n"
     "source_const = -8\n"
     "source_x = 8\n"
     "b_const = 1\n"
     "q_const = 0.3\n"
     "[penalty]\n"
     "lambda0 = 1\n"
     "ratio = 0.25\n"
     "count = 8\n"
     "[solver]\n"
     "inner_tol = 1e-11\n"
     "outer_tol = 1e-9\n"},

    {"heat-robin-coarse",
     "# Coarse-mesh variant of heat-robin-sweep for quick smoke runs and\n"
     "# refinement comparisons.\n"
     "[experiment]\n"
     "kind = heat-sweep\n"
     "name = heat-robin-coarse\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 8\n"
     "[heat]\n"
     "source_const = -8\n"
     "source_x = 8\n"
     "b_const = 1\n"
     "q_const = 0.3\n"
     "[penalty]\n"
     "lambda0 = 1\n"
     "ratio = 0.25\n"
     "count = 6\n"},

    {"contact-layer-sweep",
     "# Elastic block pressed onto a deformable layer of thickness k = 0.05;\n"
     "# the stiffer backing layer (slope cq, relaxed bound k_tilde) is made\n"
     "# rigid as lambda -> 0, recovering the unilateral bound.\n"
     "[experiment]\n"
     "kind = contact-sweep\n"
     "name = contact-layer-sweep\n"
     "[mesh]\n"
     "nx = 16\n"
     "ny = 8\n"
     "width = 2\n"
     "height = 1\n"
     "[contact]\n"
     "youngs = 1\n"
     "poisson = 0.3\n"
     "cp = 1\n"
     "cq = 1\n"
     "k = 0.05\n"
     "k_tilde = 0.1\n"
     "traction_y = -0.4\n"
     "smallness_fraction = 0.5\n"
     "[penalty]\n"
     "lambda0 = 1\n"
     "ratio = 0.25\n"
     "count = 8\n"},

    {"contact-coulomb-ratio",
     "# Single QVI solve tracking the outer fixed-point ratios of the\n"
     "# friction coupling against the certified alpha/m contraction bound.\n"
     "[experiment]\n"
     "kind = contact-solve\n"
     "name = contact-coulomb-ratio\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 4\n"
     "width = 2\n"
     "height = 1\n"
     "[contact]\n"
     "traction_y = -0.4\n"
     "smallness_fraction = 0.5\n"
     "[solver]\n"
     "outer_tol = 1e-8\n"
     "log_iterations = true\n"},

    {"control-pair-sweep",
     "# Optimal control of the heat source under the vanishing exchange\n"
     "# penalty, with cost weights and tracking target perturbed along the\n"
     "# schedule; the optimal pairs converge to the unpenalized optimum.\n"
     "[experiment]\n"
     "kind = control-pair\n"
     "name = control-pair-sweep\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 8\n"
     "[heat]\n"
     "source_const = -8\n"
     "source_x = 8\n"
     "b_const = 1\n"
     "q_const = 0.3\n"
     "[penalty]\n"
     "lambda0 = 1\n"
     "ratio = 0.25\n"
     "count = 8\n"
     "[solver]\n"
     "inner_tol = 1e-10\n"
     "[control]\n"
     "starts = 2\n"
     "basis = 4\n"
     "weight_g = 1\n"
     "weight_h = 0.1\n"
     "perturb = 0.5\n"
     "box = 5\n"
     "step_tol = 1e-7\n"},

    {"control-uniqueness",
     "# Two independently seeded optimizer runs on the strictly convex\n"
     "# zero-target tracking problem must land on the same control.\n"
     "[experiment]\n"
     "kind = control-uniqueness\n"
     "name = control-uniqueness\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 8\n"
     "[heat]\n"
     "source_const = -8\n"
     "source_x = 8\n"
     "b_const = 1\n"
     "q_const = 0.3\n"
     "[solver]\n"
     "inner_tol = 1e-10\n"
     "[control]\n"
     "starts = 2\n"
     "basis = 4\n"
     "weight_g = 1\n"
     "weight_h = 0.1\n"
     "box = 5\n"
     "step_tol = 1e-7\n"},

    {"validate-heat",
     "# Samples the structural hypotheses of the heat instance against its\n"
     "# certified constants.\n"
     "[experiment]\n"
     "kind = validate\n"
     "name = validate-heat\n"
     "model = heat\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 8\n"
     "[heat]\n"
     "source_const = -8\n"
     "source_x = 8\n"
     "b_const = 1\n"
     "q_const = 0.3\n"
     "[run]\n"
     "samples = 200\n"},

    {"validate-contact",
     "# Samples the structural hypotheses of the frictional contact instance\n"
     "# (four-point bound, growth bound, trace constant) against the\n"
     "# certified constants.\n"
     "[experiment]\n"
     "kind = validate\n"
     "name = validate-contact\n"
     "model = contact\n"
     "[mesh]\n"
     "nx = 8\n"
     "ny = 4\n"
     "width = 2\n"
     "height = 1\n"
     "[contact]\n"
     "traction_y = -0.4\n"
     "smallness_fraction = 0.5\n"
     "[run]\n"
     "samples = 200\n"},
};

}  // namespace

std::vector<std::string> list_presets() {
  std::vector<std::string> names;
  for (const Preset& p : kPresets) names.push_back(p.name);
  return names;
}

std::string preset_config(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return p.text;
  throw ConfigError("unknown preset \"" + name + "\" (see `qvilab list`)");
}

}  // namespace qvi
