// Command line front end: run experiments from presets or config files,
// list the builtin presets, or just validate a model's constants.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qvi/experiment.hpp"

namespace {

struct CommonOpts {
  std::string preset;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_source_options(CLI::App* sub, CommonOpts& opts) {
  auto* p = sub->add_option("--preset", opts.preset, "builtin preset name");
  auto* c = sub->add_option("--config", opts.config_path, "path to a key=value config file");
  p->excludes(c);
  sub->add_option("--out", opts.out_dir, "output directory (default out/<name>)");
  sub->add_option("--seed", opts.seed, "override [run] seed");
  sub->add_option("--threads", opts.threads, "override [run] threads")
      ->check(CLI::PositiveNumber);
}

qvi::ExperimentConfig load_config(const CommonOpts& opts) {
  if (!opts.preset.empty())
    return qvi::ExperimentConfig::from_string(qvi::preset_config(opts.preset),
                                              "preset:" + opts.preset);
  if (!opts.config_path.empty()) return qvi::ExperimentConfig::from_file(opts.config_path);
  throw qvi::ConfigError("need --preset or --config");
}

void apply_overrides(qvi::ExperimentConfig& cfg, const CommonOpts& opts) {
  if (opts.seed) cfg.run.seed = *opts.seed;
  if (opts.threads) cfg.run.threads = *opts.threads;
}

int run_and_report(const qvi::ExperimentConfig& cfg, const std::string& out_dir) {
  qvi::ExperimentResult res = qvi::run_experiment(cfg, out_dir);
  std::fputs(res.summary.c_str(), stdout);
  std::printf("wrote %zu files to %s\n", res.files.size(), out_dir.c_str());
  return res.verdict.pass() ? 0 : 1;
}

int cmd_list() {
  for (const std::string& name : qvi::list_presets()) {
    qvi::ExperimentConfig cfg =
        qvi::ExperimentConfig::from_string(qvi::preset_config(name), "preset:" + name);
    std::printf("%-24s %-20s %s model, %dx%d mesh\n", name.c_str(),
                qvi::kind_name(cfg.kind), cfg.model.c_str(), cfg.mesh.nx, cfg.mesh.ny);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elliptic quasivariational inequality lab"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  bool timings = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment and write its artifacts");
  add_source_options(run, run_opts);
  run->add_flag("--timings", timings, "record wall times in CSV output (breaks rerun identity)");

  CLI::App* list = app.add_subcommand("list", "list builtin presets");

  CommonOpts val_opts;
  CLI::App* validate =
      app.add_subcommand("validate", "check the model constants against random samples");
  add_source_options(validate, val_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (list->parsed()) return cmd_list();
    if (run->parsed()) {
      qvi::ExperimentConfig cfg = load_config(run_opts);
      apply_overrides(cfg, run_opts);
      cfg.run.timings = cfg.run.timings || timings;
      const std::string out = run_opts.out_dir.empty() ? "out/" + cfg.name : run_opts.out_dir;
      return run_and_report(cfg, out);
    }
    if (validate->parsed()) {
      qvi::ExperimentConfig cfg = load_config(val_opts);
      apply_overrides(cfg, val_opts);
      cfg.kind = qvi::ExperimentKind::Validate;
      const std::string out =
          val_opts.out_dir.empty() ? "out/" + cfg.name + "-validate" : val_opts.out_dir;
      return run_and_report(cfg, out);
    }
  } catch (const qvi::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
