#pragma once

// Experiment driver shared by the CLI and the tests: executes one
// configured experiment, writes CSV artifacts plus a human-readable
// summary into an output directory, and grades the run against the
// experiment's own convergence checks.
//
// Reruns with identical config (seed and thread count included) produce
// byte-identical CSV files; measured wall-clock seconds appear in CSVs
// only when the config opts into timings (they always appear in the
// summary, which is not covered by the reproducibility guarantee).

#include <string>
#include <vector>

#include "qvi/config.hpp"

namespace qvi {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct Verdict {
  std::vector<CriterionResult> criteria;
  bool pass() const;
  std::string to_text() const;  // one [PASS]/[FAIL] line per criterion
};

struct ExperimentResult {
  std::string name;
  std::string kind;
  Verdict verdict;
  std::vector<std::string> files;  // paths written, relative to out_dir
  std::string summary;             // contents of summary.txt
};

// Runs the configured experiment, creating out_dir if needed.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Builtin experiment catalog; configs are complete INI texts parseable by
// ExperimentConfig::from_string.
std::vector<std::string> list_presets();
std::string preset_config(const std::string& name);  // throws ConfigError if unknown

}  // namespace qvi
