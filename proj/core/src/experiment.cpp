#include "qvi/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qvi/hypotheses.hpp"
#include "qvi/problem_io.hpp"

namespace qvi {

namespace {

namespace fs = std::filesystem;

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Collects written artifacts under one output directory.
struct Sink {
  std::string out_dir;

  explicit Sink(std::string dir) : out_dir(std::move(dir)) {
    fs::create_directories(out_dir);
  }

  std::string path(const std::string& rel) const { return out_dir + "/" + rel; }

  void write(const std::string& rel, const std::string& content) const {
    std::ofstream out(path(rel), std::ios::binary);
    if (!out) throw Error("cannot write " + path(rel));
    out << content;
  }
};

std::vector<std::string> list_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  return files;
}

void add_criterion(Verdict& v, const std::string& name, bool pass, double measured,
                   double threshold, const std::string& note = {}) {
  v.criteria.push_back({name, pass, measured, threshold, note});
}

bool series_ok(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Non-increasing trend with per-step slack; tiny absolute floor so exactly
// zero series (trivial data) pass.
void check_monotone(Verdict& verdict, const std::string& name, const std::vector<double>& v,
                    double slack) {
  if (v.size() < 2 || !series_ok(v)) {
    add_criterion(verdict, name, series_ok(v), 0.0, slack,
                  series_ok(v) ? "fewer than 2 rows" : "non-finite value in series");
    return;
  }
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double atol = 1e-12 * (1.0 + peak);
  double worst = 0.0;
  bool pass = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] <= atol) continue;
    const double ratio = v[i + 1] / std::max(v[i], atol);
    worst = std::max(worst, ratio);
    if (v[i + 1] > slack * v[i] + atol) pass = false;
  }
  add_criterion(verdict, name, pass, worst, slack);
}

// final <= frac * first, trivially passing when the first entry vanishes.
void check_final_ratio(Verdict& verdict, const std::string& name, const std::vector<double>& v,
                       double frac) {
  if (v.empty() || !series_ok(v)) {
    add_criterion(verdict, name, false, 0.0, frac, "missing or non-finite series");
    return;
  }
  const double first = v.front(), final = v.back();
  const double atol = 1e-12 * (1.0 + std::abs(first));
  if (first <= atol) {
    add_criterion(verdict, name, final <= atol, 0.0, frac, "first row ~ 0");
    return;
  }
  add_criterion(verdict, name, final <= frac * first + atol, final / first, frac);
}

void check_rows_converged(Verdict& verdict, const ConvergenceTable& table) {
  int ok = 0;
  for (const SweepRow& r : table.rows) ok += r.ok ? 1 : 0;
  add_criterion(verdict, "rows-converged", ok == static_cast<int>(table.rows.size()),
                static_cast<double>(ok), static_cast<double>(table.rows.size()));
}

std::vector<double> column(const ConvergenceTable& t, double SweepRow::*field) {
  std::vector<double> v;
  for (const SweepRow& r : t.rows) v.push_back(r.*field);
  return v;
}

std::string sweep_csv(const ConvergenceTable& table, bool timings) {
  ConvergenceTable plain = table;
  plain.extra_name.clear();
  return plain.to_csv(!timings);
}

std::string extra_csv(const ConvergenceTable& table) {
  std::string out = "lambda," + table.extra_name + "\n";
  for (const SweepRow& r : table.rows)
    out += csv_double(r.lambda) + "," + csv_double(r.extra) + "\n";
  return out;
}

std::string rows_text(const ConvergenceTable& table) {
  std::ostringstream os;
  for (const SweepRow& r : table.rows) {
    os << "  lambda=" << csv_double(r.lambda) << "  distance=" << csv_double(r.distance_x)
       << "  violation=" << csv_double(r.violation);
    if (!table.extra_name.empty())
      os << "  " << table.extra_name << "=" << csv_double(r.extra);
    os << "  inner=" << r.inner_iters << "  outer=" << r.outer_iters << "  ("
       << csv_double(r.seconds) << " s)" << (r.ok ? "" : "  [FAILED]") << "\n";
  }
  return os.str();
}

SolverParams solver_params(const ExperimentConfig& cfg, const Sink& sink) {
  SolverParams params = cfg.solver;
  if (cfg.log_iterations) params.log_path = sink.path("iterations.csv");
  return params;
}

// ---------------------------------------------------------------- heat ----

ExperimentResult run_heat_sweep(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  Mesh2D mesh = unit_square(static_cast<std::size_t>(cfg.mesh.nx),
                            static_cast<std::size_t>(cfg.mesh.ny));
  HeatAssembly ha = assemble_heat(mesh, cfg.heat_data(mesh));
  if (cfg.run.save_problem) {
    save_mesh(sink.path("mesh.json"), mesh);
    save_problem(sink.path("problem.json"), ha.problem, &ha.penalty);
  }
  SweepResult sweep =
      robin_limit_experiment(ha, cfg.schedule, solver_params(cfg, sink), cfg.run.threads);

  sink.write("sweep.csv", sweep_csv(sweep.table, cfg.run.timings));
  sink.write("gamma2_gap.csv", extra_csv(sweep.table));
  std::string refcsv = "node,x,y,u\n";
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const int d = ha.free_of_node[n];
    const double u = d >= 0 ? sweep.u_ref[static_cast<std::size_t>(d)] : 0.0;
    refcsv += std::to_string(n) + "," + csv_double(mesh.nodes[n][0]) + "," +
              csv_double(mesh.nodes[n][1]) + "," + csv_double(u) + "\n";
  }
  sink.write("reference.csv", refcsv);

  check_rows_converged(res.verdict, sweep.table);
  check_monotone(res.verdict, "distance-monotone", column(sweep.table, &SweepRow::distance_x),
                 1.05);
  check_monotone(res.verdict, "gamma2-gap-monotone", column(sweep.table, &SweepRow::extra),
                 1.05);
  check_monotone(res.verdict, "violation-monotone", column(sweep.table, &SweepRow::violation),
                 1.05);
  check_final_ratio(res.verdict, "distance-final/first",
                    column(sweep.table, &SweepRow::distance_x), 0.01);
  check_final_ratio(res.verdict, "gamma2-gap-final/first",
                    column(sweep.table, &SweepRow::extra), 0.01);

  std::ostringstream os;
  os << "mesh: " << cfg.mesh.nx << "x" << cfg.mesh.ny << " unit square, "
     << mesh.node_count() << " nodes, " << ha.problem.dim() << " free dofs\n"
     << "constants: m=" << csv_double(ha.problem.a.m) << "  M=" << csv_double(ha.problem.a.M)
     << "  C_P=" << csv_double(ha.poincare) << "  L_G=" << csv_double(ha.penalty.g.lipschitz)
     << "\nreference solve: " << sweep.ref_solution.inner_iterations << " inner iterations ("
     << sweep.ref_solution.method << ")\n"
     << "rows:\n"
     << rows_text(sweep.table) << "total wall time: " << csv_double(wall_seconds() - t0)
     << " s\n";
  res.summary = os.str();
  return res;
}

// ------------------------------------------------------------- contact ----

ExperimentResult run_contact_sweep(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  Mesh2D mesh = rectangle(cfg.mesh.width, cfg.mesh.height,
                          static_cast<std::size_t>(cfg.mesh.nx),
                          static_cast<std::size_t>(cfg.mesh.ny));
  ContactAssembly ca = assemble_contact(mesh, cfg.contact);
  if (cfg.run.save_problem) {
    save_mesh(sink.path("mesh.json"), mesh);
    save_problem(sink.path("problem.json"), ca.problem, &ca.penalty);
  }
  SweepResult sweep =
      layered_foundation_experiment(ca, cfg.schedule, solver_params(cfg, sink), cfg.run.threads);

  sink.write("sweep.csv", sweep_csv(sweep.table, cfg.run.timings));
  sink.write("penetration.csv", extra_csv(sweep.table));

  const Vec gap_ref = ca.normal_gap(sweep.u_ref);
  const Vec slip_ref = ca.tangential_slip(sweep.u_ref);
  const Solution* last = nullptr;
  for (std::size_t i = sweep.solutions.size(); i-- > 0;) {
    if (sweep.table.rows[i].ok) {
      last = &sweep.solutions[i];
      break;
    }
  }
  const Vec gap_last = last ? ca.normal_gap(last->u) : Vec(gap_ref.size(), 0.0);
  const Vec slip_last = last ? ca.tangential_slip(last->u) : Vec(slip_ref.size(), 0.0);
  std::string prof = "node,x,gap_ref,slip_ref,gap_final,slip_final\n";
  for (std::size_t i = 0; i < ca.contact_nodes.size(); ++i) {
    prof += std::to_string(ca.contact_nodes[i]) + "," +
            csv_double(mesh.nodes[ca.contact_nodes[i]][0]) + "," + csv_double(gap_ref[i]) +
            "," + csv_double(slip_ref[i]) + "," + csv_double(gap_last[i]) + "," +
            csv_double(slip_last[i]) + "\n";
  }
  sink.write("profile.csv", prof);

  check_rows_converged(res.verdict, sweep.table);
  check_monotone(res.verdict, "distance-monotone", column(sweep.table, &SweepRow::distance_x),
                 1.05);
  check_monotone(res.verdict, "penetration-monotone", column(sweep.table, &SweepRow::extra),
                 1.05);
  check_final_ratio(res.verdict, "penetration-final/first",
                    column(sweep.table, &SweepRow::extra), 0.01);

  std::ostringstream os;
  os << "mesh: " << cfg.mesh.nx << "x" << cfg.mesh.ny << " rectangle "
     << csv_double(cfg.mesh.width) << "x" << csv_double(cfg.mesh.height) << ", "
     << mesh.node_count() << " nodes, " << ca.problem.dim() << " free dofs\n"
     << "constants: m=" << csv_double(ca.problem.a.m) << "  M=" << csv_double(ca.problem.a.M)
     << "  d0^2=" << csv_double(ca.d0_sq) << "  mu=" << csv_double(ca.mu)
     << "  alpha=" << csv_double(ca.problem.j.alpha) << "\n"
     << "reference solve: " << sweep.ref_solution.outer_iterations << " outer / "
     << sweep.ref_solution.inner_iterations << " inner iterations ("
     << sweep.ref_solution.method << ")\n"
     << "rows:\n"
     << rows_text(sweep.table) << "total wall time: " << csv_double(wall_seconds() - t0)
     << " s\n";
  res.summary = os.str();
  return res;
}

ExperimentResult run_contact_solve(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  Mesh2D mesh = rectangle(cfg.mesh.width, cfg.mesh.height,
                          static_cast<std::size_t>(cfg.mesh.nx),
                          static_cast<std::size_t>(cfg.mesh.ny));
  ContactAssembly ca = assemble_contact(mesh, cfg.contact);
  if (cfg.run.save_problem) {
    save_mesh(sink.path("mesh.json"), mesh);
    save_problem(sink.path("problem.json"), ca.problem, &ca.penalty);
  }
  Solution sol = solve_qvi(ca.problem, solver_params(cfg, sink));
  HypothesisReport rep = validate_hypotheses(ca.problem, cfg.run.samples, cfg.run.seed);
  const double ratio = coulomb_fixed_point_diagnostics(sol);
  const double bound = rep.alpha_hat / std::max(rep.m_hat, 1e-300) + 0.05;

  std::string outer = "iter,inner_iters,stat_residual,ratio\n";
  for (std::size_t i = 0; i < sol.inner_logs.size(); ++i) {
    const double r = (i >= 2 && i - 2 < sol.contraction_estimates.size())
                         ? sol.contraction_estimates[i - 2]
                         : 0.0;
    outer += std::to_string(i + 1) + "," + std::to_string(sol.inner_logs[i].iterations) + "," +
             csv_double(sol.inner_logs[i].stat_residual) + "," + csv_double(r) + "\n";
  }
  sink.write("outer.csv", outer);

  const Vec gap = ca.normal_gap(sol.u);
  const Vec slip = ca.tangential_slip(sol.u);
  std::string prof = "node,x,gap,slip\n";
  for (std::size_t i = 0; i < ca.contact_nodes.size(); ++i) {
    prof += std::to_string(ca.contact_nodes[i]) + "," +
            csv_double(mesh.nodes[ca.contact_nodes[i]][0]) + "," + csv_double(gap[i]) + "," +
            csv_double(slip[i]) + "\n";
  }
  sink.write("profile.csv", prof);

  add_criterion(res.verdict, "qvi-converged", sol.converged, sol.converged ? 1.0 : 0.0, 1.0);
  add_criterion(res.verdict, "outer-iterations", sol.outer_iterations <= 25,
                static_cast<double>(sol.outer_iterations), 25.0);
  add_criterion(res.verdict, "outer-ratio-bound", ratio <= bound, ratio, bound,
                "alpha_hat/m_hat + 0.05");
  add_criterion(res.verdict, "hypotheses-consistent", rep.consistent, rep.consistent ? 1 : 0,
                1.0);

  std::ostringstream os;
  os << "mesh: " << cfg.mesh.nx << "x" << cfg.mesh.ny << " rectangle, " << ca.problem.dim()
     << " free dofs\n"
     << "constants: m=" << csv_double(ca.problem.a.m) << "  alpha=" << csv_double(ca.problem.j.alpha)
     << "  mu=" << csv_double(ca.mu) << "  d0^2=" << csv_double(ca.d0_sq) << "\n"
     << "sampled: m_hat=" << csv_double(rep.m_hat) << "  alpha_hat=" << csv_double(rep.alpha_hat)
     << "\n"
     << "outer iterations: " << sol.outer_iterations
     << "  max ratio: " << csv_double(ratio) << "  bound: " << csv_double(bound) << "\n"
     << "inner iterations: " << sol.inner_iterations << " (" << sol.method << ")\n"
     << "total wall time: " << csv_double(wall_seconds() - t0) << " s\n";
  res.summary = os.str();
  return res;
}

// ------------------------------------------------------------- control ----

ExperimentResult run_control_pair(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  Mesh2D mesh = unit_square(static_cast<std::size_t>(cfg.mesh.nx),
                            static_cast<std::size_t>(cfg.mesh.ny));
  HeatAssembly ha = assemble_heat(mesh, cfg.heat_data(mesh));
  ControlSpace space = patch_control_space(mesh, ha, cfg.control.basis, cfg.control.box);
  SeparableCost base = heat_tracking_cost(ha, cfg.control.weight_g, cfg.control.weight_h);

  // Vanishing perturbation: weights deflated by 1/(1 + lambda/2), tracking
  // target lambda * psi with a constant profile psi >= 0. Since the state is
  // nonnegative, every perturbation lowers the optimal cost, so the gap to
  // the limit problem decays with one sign.
  std::vector<SeparableCost> cost_seq;
  for (double lambda : cfg.schedule.levels()) {
    const double w = 1.0 / (1.0 + 0.5 * lambda);
    Vec target(static_cast<std::size_t>(ha.problem.dim()), cfg.control.perturb * lambda);
    cost_seq.push_back(base.scaled(w, w, std::move(target)));
  }

  PairSweepResult pairs = optimal_pair_sweep(
      ha.problem, ha.penalty, cfg.schedule, cost_seq, base, space, cfg.control.starts,
      cfg.run.seed, solver_params(cfg, sink), cfg.control.opt, cfg.run.threads);

  const auto levels = cfg.schedule.levels();
  std::string csv = "lambda,cost,cost_gap,control_dist,evaluations\n";
  for (const PairSweepRow& r : pairs.rows)
    csv += csv_double(r.lambda) + "," + csv_double(r.pair.cost) + "," +
           csv_double(r.cost_gap) + "," + csv_double(r.control_dist) + "," +
           std::to_string(r.pair.evaluations) + "\n";
  sink.write("pairs.csv", csv);

  std::string ctl = "lambda";
  for (int j = 0; j < space.dim(); ++j) ctl += ",c" + std::to_string(j);
  ctl += "\n0";
  for (double c : pairs.reference.coeffs) ctl += "," + csv_double(c);
  ctl += "\n";
  for (const PairSweepRow& r : pairs.rows) {
    ctl += csv_double(r.lambda);
    for (double c : r.pair.coeffs) ctl += "," + csv_double(c);
    ctl += "\n";
  }
  sink.write("controls.csv", ctl);

  bool all_ok = true;
  std::vector<double> gaps, dists;
  for (const PairSweepRow& r : pairs.rows) {
    all_ok = all_ok && r.ok;
    gaps.push_back(r.cost_gap);
    dists.push_back(r.control_dist);
  }
  add_criterion(res.verdict, "rows-converged", all_ok,
                static_cast<double>(std::count_if(pairs.rows.begin(), pairs.rows.end(),
                                                  [](const PairSweepRow& r) { return r.ok; })),
                static_cast<double>(pairs.rows.size()));
  check_monotone(res.verdict, "cost-gap-monotone", gaps, 1.05);
  check_final_ratio(res.verdict, "cost-gap-final/first", gaps, 0.05);
  check_final_ratio(res.verdict, "control-dist-final/first", dists, 0.10);

  // Complementarity of every accepted optimal state on its own penalized
  // problem (the zero-target heat instance has no friction term).
  double worst_comp = 0.0;
  for (std::size_t i = 0; i < pairs.rows.size(); ++i) {
    if (!pairs.rows[i].ok) continue;
    GalerkinProblem pn = penalized_problem(ha.problem, ha.penalty, levels[i])
                             .with_load(pairs.rows[i].pair.f);
    worst_comp = std::max(worst_comp, complementarity_check(pn, pairs.rows[i].pair.u));
  }
  add_criterion(res.verdict, "complementarity", worst_comp <= 10.0 * cfg.solver.inner_tol,
                worst_comp, 10.0 * cfg.solver.inner_tol);

  std::ostringstream os;
  os << "mesh: " << cfg.mesh.nx << "x" << cfg.mesh.ny << " unit square, " << ha.problem.dim()
     << " free dofs; control basis " << space.dim() << " patches\n"
     << "reference: cost=" << csv_double(pairs.reference.cost) << "  evaluations="
     << pairs.reference.evaluations << "\nrows:\n";
  for (const PairSweepRow& r : pairs.rows)
    os << "  lambda=" << csv_double(r.lambda) << "  cost=" << csv_double(r.pair.cost)
       << "  gap=" << csv_double(r.cost_gap) << "  control_dist="
       << csv_double(r.control_dist) << (r.ok ? "" : "  [FAILED]") << "\n";
  os << "worst complementarity: " << csv_double(worst_comp) << "\n"
     << "total wall time: " << csv_double(wall_seconds() - t0) << " s\n";
  res.summary = os.str();
  return res;
}

ExperimentResult run_control_uniqueness(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  Mesh2D mesh = unit_square(static_cast<std::size_t>(cfg.mesh.nx),
                            static_cast<std::size_t>(cfg.mesh.ny));
  HeatAssembly ha = assemble_heat(mesh, cfg.heat_data(mesh));
  ControlSpace space = patch_control_space(mesh, ha, cfg.control.basis, cfg.control.box);
  SeparableCost base = heat_tracking_cost(ha, cfg.control.weight_g, cfg.control.weight_h);
  SolverParams params = solver_params(cfg, sink);

  const std::uint64_t seed2 = cfg.run.seed ^ 0x9e3779b97f4a7c15ULL;
  OptimalPair a = optimize_control(ha.problem, base, space, cfg.control.starts, cfg.run.seed,
                                   params, cfg.control.opt, cfg.run.threads);
  OptimalPair b = optimize_control(ha.problem, base, space, cfg.control.starts, seed2, params,
                                   cfg.control.opt, cfg.run.threads);
  const double dist = ha.problem.inner_y.dist(a.f, b.f);
  const double cost_diff = std::abs(a.cost - b.cost);

  std::string csv = "run,cost,evaluations";
  for (int j = 0; j < space.dim(); ++j) csv += ",c" + std::to_string(j);
  csv += "\n";
  const OptimalPair* runs[2] = {&a, &b};
  for (int i = 0; i < 2; ++i) {
    csv += std::to_string(i + 1) + "," + csv_double(runs[i]->cost) + "," +
           std::to_string(runs[i]->evaluations);
    for (double c : runs[i]->coeffs) csv += "," + csv_double(c);
    csv += "\n";
  }
  sink.write("optima.csv", csv);

  add_criterion(res.verdict, "control-distance", dist <= 1e-4, dist, 1e-4, "Y-norm");
  add_criterion(res.verdict, "cost-agreement", cost_diff <= 1e-7 * (1.0 + std::abs(a.cost)),
                cost_diff, 1e-7 * (1.0 + std::abs(a.cost)));

  std::ostringstream os;
  os << "mesh: " << cfg.mesh.nx << "x" << cfg.mesh.ny << " unit square; basis " << space.dim()
     << " patches; seeds " << cfg.run.seed << " and " << seed2 << "\n"
     << "run 1: cost=" << csv_double(a.cost) << " evaluations=" << a.evaluations << "\n"
     << "run 2: cost=" << csv_double(b.cost) << " evaluations=" << b.evaluations << "\n"
     << "control distance (Y-norm): " << csv_double(dist) << "\n"
     << "total wall time: " << csv_double(wall_seconds() - t0) << " s\n";
  res.summary = os.str();
  return res;
}

// ------------------------------------------------------------ validate ----

ExperimentResult run_validate(const ExperimentConfig& cfg, const Sink& sink) {
  ExperimentResult res;
  const double t0 = wall_seconds();
  HypothesisReport rep;
  std::ostringstream os;
  if (cfg.model == "heat") {
    Mesh2D mesh = unit_square(static_cast<std::size_t>(cfg.mesh.nx),
                              static_cast<std::size_t>(cfg.mesh.ny));
    HeatAssembly ha = assemble_heat(mesh, cfg.heat_data(mesh));
    rep = validate_hypotheses(ha.problem, cfg.run.samples, cfg.run.seed);
    os << "model: heat " << cfg.mesh.nx << "x" << cfg.mesh.ny << ", " << ha.problem.dim()
       << " free dofs\n";
  } else {
    Mesh2D mesh = rectangle(cfg.mesh.width, cfg.mesh.height,
                            static_cast<std::size_t>(cfg.mesh.nx),
                            static_cast<std::size_t>(cfg.mesh.ny));
    ContactAssembly ca = assemble_contact(mesh, cfg.contact);
    rep = validate_hypotheses(ca.problem, cfg.run.samples, cfg.run.seed);
    os << "model: contact " << cfg.mesh.nx << "x" << cfg.mesh.ny << ", " << ca.problem.dim()
       << " free dofs\n";
  }
  sink.write("report.txt", rep.summary());

  add_criterion(res.verdict, "monotonicity", rep.monotonicity_ok, rep.m_hat, rep.m);
  add_criterion(res.verdict, "lipschitz", rep.lipschitz_ok, rep.M_hat, rep.M);
  add_criterion(res.verdict, "four-point", rep.fourpoint_ok, rep.alpha_hat, rep.alpha);
  add_criterion(res.verdict, "growth", rep.growth_ok, rep.gamma_hat, rep.gamma);
  add_criterion(res.verdict, "trace", rep.trace_ok, rep.c0_hat, rep.c0);
  add_criterion(res.verdict, "smallness", rep.smallness_ok, rep.alpha, rep.m, "alpha < m");

  os << rep.summary() << "total wall time: " << csv_double(wall_seconds() - t0) << " s\n";
  res.summary = os.str();
  return res;
}

}  // namespace

bool Verdict::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.pass; });
}

std::string Verdict::to_text() const {
  std::ostringstream os;
  for (const CriterionResult& c : criteria) {
    os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": measured "
       << csv_double(c.measured) << " vs threshold " << csv_double(c.threshold);
    if (!c.note.empty()) os << " (" << c.note << ")";
    os << "\n";
  }
  os << "overall: " << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  Sink sink(out_dir);
  ExperimentResult res;
  switch (cfg.kind) {
    case ExperimentKind::HeatSweep: res = run_heat_sweep(cfg, sink); break;
    case ExperimentKind::ContactSweep: res = run_contact_sweep(cfg, sink); break;
    case ExperimentKind::ContactSolve: res = run_contact_solve(cfg, sink); break;
    case ExperimentKind::ControlPair: res = run_control_pair(cfg, sink); break;
    case ExperimentKind::ControlUniqueness: res = run_control_uniqueness(cfg, sink); break;
    case ExperimentKind::Validate: res = run_validate(cfg, sink); break;
  }
  res.name = cfg.name;
  res.kind = kind_name(cfg.kind);

  std::ostringstream os;
  os << "experiment: " << res.name << " (" << res.kind << ")\n"
     << "seed: " << cfg.run.seed << "  threads: " << cfg.run.threads << "\n"
     << res.summary << "verdict:\n"
     << res.verdict.to_text();
  res.summary = os.str();
  sink.write("summary.txt", res.summary);
  res.files = list_dir(out_dir);
  return res;
}

}  // namespace qvi
