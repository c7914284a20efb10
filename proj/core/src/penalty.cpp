#include "qvi/penalty.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <thread>

namespace qvi {

namespace {

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// "dir/iters.csv" + "_row3" -> "dir/iters_row3.csv"
std::string tagged_path(const std::string& base, const std::string& tag) {
  if (base.empty()) return base;
  auto dot = base.rfind('.');
  auto slash = base.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + tag;
  return base.substr(0, dot) + tag + base.substr(dot);
}

void parallel_rows(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  int workers = std::min(threads, count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Vec PenaltyOperator::covector(const Vec& u) const {
  Vec out(u.size(), 0.0);
  for (const NodalTerm& t : terms) out[t.dof] += t.covector(u[t.dof]);
  return out;
}

void PenaltySchedule::validate() const {
  if (!(lambda0 > 0.0)) throw ConfigError("schedule: lambda0 must be > 0");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("schedule: ratio must be in (0,1)");
  if (count < 1) throw ConfigError("schedule: count must be >= 1");
}

std::vector<double> PenaltySchedule::levels() const {
  validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  double l = lambda0;
  for (int i = 0; i < count; ++i) {
    out.push_back(l);
    l *= ratio;
  }
  return out;
}

std::string ConvergenceTable::to_csv(bool zero_seconds) const {
  std::string out = "lambda,distance_X,violation,inner_iters,outer_iters,seconds";
  if (!extra_name.empty()) out += "," + extra_name;
  out += "\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    double secs = zero_seconds ? 0.0 : r.seconds;
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%ld,%d,%.6g", r.lambda, r.distance_x,
                  r.violation, r.inner_iters, r.outer_iters, secs);
    out += buf;
    if (!extra_name.empty()) {
      std::snprintf(buf, sizeof(buf), ",%.12g", r.extra);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

GalerkinProblem penalized_problem(const GalerkinProblem& p, const PenaltySpec& pen,
                                  double lambda) {
  if (!(lambda > 0.0)) throw Error("penalized_problem: lambda must be > 0");
  if (pen.k_tilde.dim != p.dim()) throw DimensionError("penalized_problem: k_tilde dimension");
  OperatorSpec a = p.a;
  for (NodalTerm t : pen.g.terms) {
    t.weight /= lambda;
    a.boundary.push_back(t);
  }
  // The penalty term is monotone: same m, Lipschitz constant grows.
  a.M = p.a.M + pen.g.lipschitz / lambda;
  return GalerkinProblem::make(p.inner_x, p.inner_y, std::move(a), pen.k_tilde, p.j, p.pi, p.f,
                               p.extra_load);
}

Solution solve_penalized(const GalerkinProblem& p, const PenaltySpec& pen, double lambda,
                         const SolverParams& params, const Vec* start) {
  GalerkinProblem pn = penalized_problem(p, pen, lambda);
  return solve_qvi(pn, params, start);
}

double violation(const PenaltySpec& pen, const Vec& u) {
  double s = 0.0;
  for (const NodalTerm& t : pen.g.terms) {
    if (t.slope <= 0.0) continue;
    double gap = t.value(u[t.dof]) / t.slope;
    s += t.weight * gap * gap;
  }
  return std::sqrt(s);
}

SweepResult penalty_sweep(const GalerkinProblem& p, const PenaltySpec& pen,
                          const PenaltySchedule& sched, const std::vector<Vec>* f_seq,
                          const SolverParams& params, int threads) {
  std::vector<double> levels = sched.levels();
  if (f_seq && static_cast<int>(f_seq->size()) != sched.count)
    throw DimensionError("penalty_sweep: f_seq size must match schedule count");

  SweepResult out;
  SolverParams ref_params = params;
  ref_params.log_path = tagged_path(params.log_path, "_ref");
  out.ref_solution = solve_qvi(p, ref_params);
  if (!out.ref_solution.converged)
    throw NonConvergence("penalty_sweep: reference solve failed",
                         out.ref_solution.outer_iterations, out.ref_solution.final_residual);
  out.u_ref = out.ref_solution.u;
  out.table.rows.resize(levels.size());
  out.solutions.resize(levels.size());

  const bool sequential = threads <= 1;
  Vec warm = out.u_ref;  // reasonable first guess for lambda0

  auto run_row = [&](int i, const Vec* start) {
    SweepRow& row = out.table.rows[i];
    row.lambda = levels[i];
    double t0 = wall_seconds();
    try {
      GalerkinProblem pi_n = f_seq ? p.with_load((*f_seq)[i]) : p;
      SolverParams row_params = params;
      row_params.log_path = tagged_path(params.log_path, "_row" + std::to_string(i));
      Solution sol = solve_penalized(pi_n, pen, levels[i], row_params, start);
      row.seconds = wall_seconds() - t0;
      row.inner_iters = sol.inner_iterations;
      row.outer_iters = sol.outer_iterations;
      row.ok = sol.converged;
      if (sol.converged) {
        row.distance_x = p.inner_x.dist(sol.u, out.u_ref);
        row.violation = violation(pen, sol.u);
        Vec gcov = pen.g.covector(sol.u);
        row.sign_check = dot(gcov, vsub(out.u_ref, sol.u));
      } else {
        row.distance_x = std::numeric_limits<double>::quiet_NaN();
        row.violation = std::numeric_limits<double>::quiet_NaN();
      }
      out.solutions[i] = std::move(sol);
    } catch (const Error&) {
      row.seconds = wall_seconds() - t0;
      row.ok = false;
      row.distance_x = std::numeric_limits<double>::quiet_NaN();
      row.violation = std::numeric_limits<double>::quiet_NaN();
    }
  };

  if (sequential) {
    for (int i = 0; i < static_cast<int>(levels.size()); ++i) {
      run_row(i, &warm);
      if (out.table.rows[i].ok) warm = out.solutions[i].u;
    }
  } else {
    parallel_rows(static_cast<int>(levels.size()), threads, [&](int i) { run_row(i, nullptr); });
  }
  return out;
}

}  // namespace qvi
