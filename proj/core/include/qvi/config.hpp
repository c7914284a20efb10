#pragma once

// Flat key = value experiment configuration.
//
// Format: INI-like sections, one "key = value" per line, "#" or ";"
// comments, blank lines ignored. Unknown sections or keys are rejected so
// typos fail loudly. The full schema with defaults is listed in the README
// and printed by the CLI for every builtin preset.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qvi/fem_contact.hpp"
#include "qvi/fem_heat.hpp"

namespace qvi {

// Raw parsed file: ordered sections of key/value pairs.
struct KvFile {
  struct Section {
    std::string name;
    std::map<std::string, std::string> entries;
  };
  std::vector<Section> sections;

  static KvFile parse(const std::string& text, const std::string& origin);
  const Section* find(const std::string& name) const;
};

enum class ExperimentKind {
  HeatSweep,          // robin_limit_experiment on the heat instance
  ContactSweep,       // layered_foundation_experiment on the contact instance
  ContactSolve,       // single contact QVI solve with outer-loop diagnostics
  ControlPair,        // optimal_pair_sweep on the heat instance
  ControlUniqueness,  // two-seed optimize_control comparison (heat)
  Validate,           // hypothesis validation report
};
const char* kind_name(ExperimentKind k);

struct MeshConfig {
  int nx = 16;
  int ny = 16;
  double width = 2.0;   // contact rectangle only; heat uses the unit square
  double height = 1.0;
};

// Heat data fields as affine nodal profiles: value(x, y) = c + cx x + cy y.
struct HeatConfig {
  double source_const = 0.0;
  double source_x = 0.0;
  double source_y = 0.0;
  double b_const = 0.0;
  double q_const = 0.0;
};

struct ControlConfig {
  int starts = 3;
  int basis = 4;          // number of piecewise-constant patches (heat)
  double weight_g = 1.0;  // tracking weight (omega)
  double weight_h = 0.1;  // control energy weight (delta)
  double perturb = 1.0;   // scale of the vanishing cost perturbation
  double box = 5.0;       // coefficient box half-width; 0 = unbounded
  OptimizerParams opt;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  bool timings = false;     // keep measured seconds in CSV output
  int samples = 200;        // hypothesis validation sample count
  bool save_problem = false;  // dump problem.json / mesh.json alongside results
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::HeatSweep;
  std::string name;            // defaults to kind_name(kind)
  std::string model = "heat";  // validate target: heat | contact
  MeshConfig mesh;
  HeatConfig heat;
  ElasticityData contact;
  PenaltySchedule schedule;
  SolverParams solver;
  bool log_iterations = false;
  ControlConfig control;
  RunConfig run;

  static ExperimentConfig from_string(const std::string& text,
                                      const std::string& origin = "<string>");
  static ExperimentConfig from_file(const std::string& path);

  // Cross-field checks beyond per-key parsing; throws ConfigError.
  void validate() const;

  // Heat data sampled from the affine profiles on the given mesh.
  HeatData heat_data(const Mesh2D& mesh) const;
};

}  // namespace qvi
