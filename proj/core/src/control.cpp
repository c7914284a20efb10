#include "qvi/control.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qvi {

void SeparableCost::validate(int xdim, int ydim) const {
  if (obs.cols != xdim) throw DimensionError("cost: observation map column mismatch");
  if (static_cast<int>(target.size()) != obs.rows)
    throw DimensionError("cost: target size mismatch");
  if (wg.rows != obs.rows || wg.cols != obs.rows)
    throw DimensionError("cost: weight form size mismatch");
  if (h.rows != ydim || h.cols != ydim) throw DimensionError("cost: control form size mismatch");
  check_finite(target, "cost target");
}

double SeparableCost::g_of(const Vec& u) const {
  Vec r = spmv(obs, u);
  axpy(-1.0, target, r);
  return dot(r, spmv(wg, r));
}

double SeparableCost::h_of(const Vec& f) const { return dot(f, spmv(h, f)); }

SeparableCost SeparableCost::scaled(double g_factor, double h_factor, Vec new_target) const {
  if (!(g_factor >= 0.0) || !(h_factor > 0.0))
    throw Error("cost: scale factors must keep g >= 0 and h coercive");
  SeparableCost c(*this);
  for (double& v : c.wg.vals) v *= g_factor;
  for (double& v : c.h.vals) v *= h_factor;
  if (!new_target.empty()) {
    if (new_target.size() != target.size()) throw DimensionError("cost: new target size");
    c.target = std::move(new_target);
  }
  return c;
}

void ControlSpace::validate(int ydim) const {
  if (basis.empty()) throw Error("control space: empty basis");
  for (const Vec& b : basis) {
    if (static_cast<int>(b.size()) != ydim)
      throw DimensionError("control space: basis vector dimension mismatch");
    check_finite(b, "control basis");
  }
  if (!box.empty() && box.size() != basis.size())
    throw DimensionError("control space: box size must match basis size");
  for (const auto& [lo, hi] : box)
    if (lo > hi) throw Error("control space: empty coefficient box");
}

Vec ControlSpace::combine(const std::vector<double>& coeffs) const {
  if (coeffs.size() != basis.size()) throw DimensionError("control space: coefficient count");
  Vec f(basis.front().size(), 0.0);
  for (std::size_t j = 0; j < basis.size(); ++j) axpy(coeffs[j], basis[j], f);
  return f;
}

std::vector<double> ControlSpace::clamp(std::vector<double> coeffs) const {
  if (box.empty()) return coeffs;
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    coeffs[j] = std::min(std::max(coeffs[j], box[j].first), box[j].second);
  return coeffs;
}

double reduced_cost(const GalerkinProblem& p, const SeparableCost& cost, const Vec& f,
                    const SolverParams& params, Vec* state_io) {
  cost.validate(p.dim(), p.ydim());
  GalerkinProblem pf = p.with_load(f);
  const bool warm = state_io && static_cast<int>(state_io->size()) == p.dim();
  Solution sol = solve_qvi(pf, params, warm ? state_io : nullptr);
  if (!sol.converged)
    throw NonConvergence("reduced_cost: state solve failed", sol.outer_iterations,
                         sol.final_residual);
  double value = cost.g_of(sol.u) + cost.h_of(f);
  if (state_io) *state_io = std::move(sol.u);
  return value;
}

namespace {

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// (cost, coeffs) ordering with deterministic lexicographic tie-break.
bool better(double ca, const std::vector<double>& a, double cb, const std::vector<double>& b) {
  if (ca != cb) return ca < cb;
  return lex_less(a, b);
}

struct SearchResult {
  std::vector<double> coeffs;
  double cost = 0.0;
  int evals = 0;
  std::vector<TracePoint> trace;
};

SearchResult coordinate_search(const GalerkinProblem& p, const SeparableCost& cost,
                               const ControlSpace& space, std::vector<double> c,
                               const SolverParams& params, const OptimizerParams& opt) {
  SearchResult res;
  c = space.clamp(std::move(c));
  Vec state;  // carries the previous state solution as a warm start
  auto eval = [&](const std::vector<double>& coeffs) {
    ++res.evals;
    return reduced_cost(p, cost, space.combine(coeffs), params, &state);
  };
  double jc = eval(c);
  res.trace.push_back({res.evals, jc, c});
  double step = opt.step0;
  const int d = space.dim();
  while (step >= opt.step_tol && res.evals < opt.max_evals) {
    // Probe +/- step along every coordinate, move to the best improvement.
    double best_j = jc;
    std::vector<double> best_c = c;
    for (int i = 0; i < d; ++i) {
      for (double dir : {+1.0, -1.0}) {
        std::vector<double> trial = c;
        trial[i] += dir * step;
        trial = space.clamp(std::move(trial));
        if (trial == c) continue;
        double jt = eval(trial);
        if (better(jt, trial, best_j, best_c)) {
          best_j = jt;
          best_c = std::move(trial);
        }
        if (res.evals >= opt.max_evals) break;
      }
      if (res.evals >= opt.max_evals) break;
    }
    if (better(best_j, best_c, jc, c)) {
      jc = best_j;
      c = std::move(best_c);
      res.trace.push_back({res.evals, jc, c});
    } else {
      step *= opt.shrink;
    }
  }
  res.coeffs = std::move(c);
  res.cost = jc;
  return res;
}

}  // namespace

OptimalPair optimize_control(const GalerkinProblem& p, const SeparableCost& cost,
                             const ControlSpace& space, int starts, std::uint64_t seed,
                             const SolverParams& params, const OptimizerParams& opt, int threads,
                             const std::vector<double>* warm) {
  space.validate(p.ydim());
  cost.validate(p.dim(), p.ydim());
  if (starts < 1) throw Error("optimize_control: need at least one start");

  const int d = space.dim();
  std::vector<std::vector<double>> start_pts;
  if (warm) {
    if (static_cast<int>(warm->size()) != d)
      throw DimensionError("optimize_control: warm start dimension");
    start_pts.push_back(space.clamp(*warm));
  }
  if (static_cast<int>(start_pts.size()) < starts)
    start_pts.push_back(space.clamp(std::vector<double>(d, 0.0)));
  Rng rng(seed);
  while (static_cast<int>(start_pts.size()) < starts) {
    std::vector<double> c(d);
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    start_pts.push_back(space.clamp(std::move(c)));
  }

  std::vector<SearchResult> results(start_pts.size());
  if (threads > 1 && start_pts.size() > 1) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int workers = std::min<int>(threads, static_cast<int>(start_pts.size()));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          int i = next.fetch_add(1);
          if (i >= static_cast<int>(start_pts.size())) return;
          results[i] = coordinate_search(p, cost, space, start_pts[i], params, opt);
        }
      });
    }
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t i = 0; i < start_pts.size(); ++i)
      results[i] = coordinate_search(p, cost, space, start_pts[i], params, opt);
  }

  int best = 0;
  for (int i = 1; i < static_cast<int>(results.size()); ++i) {
    if (better(results[i].cost, results[i].coeffs, results[best].cost, results[best].coeffs))
      best = i;
  }
  OptimalPair pair;
  pair.coeffs = results[best].coeffs;
  pair.f = space.combine(pair.coeffs);
  Solution sol = solve_qvi(p.with_load(pair.f), params);
  if (!sol.converged)
    throw NonConvergence("optimize_control: final state solve failed", sol.outer_iterations,
                         sol.final_residual);
  pair.u = std::move(sol.u);
  pair.cost = results[best].cost;
  pair.trace = std::move(results[best].trace);
  for (const SearchResult& r : results) pair.evaluations += r.evals;
  return pair;
}

PairSweepResult optimal_pair_sweep(const GalerkinProblem& p, const PenaltySpec& pen,
                                   const PenaltySchedule& sched,
                                   const std::vector<SeparableCost>& cost_seq,
                                   const SeparableCost& cost_limit, const ControlSpace& space,
                                   int starts, std::uint64_t seed, const SolverParams& params,
                                   const OptimizerParams& opt, int threads) {
  std::vector<double> levels = sched.levels();
  if (static_cast<int>(cost_seq.size()) != sched.count)
    throw DimensionError("optimal_pair_sweep: cost_seq size must match schedule count");

  PairSweepResult out;
  out.reference = optimize_control(p, cost_limit, space, starts, seed, params, opt, threads);
  out.rows.resize(levels.size());
  const std::vector<double>* warm = nullptr;
  for (int n = 0; n < static_cast<int>(levels.size()); ++n) {
    PairSweepRow& row = out.rows[n];
    row.lambda = levels[n];
    try {
      GalerkinProblem pn = penalized_problem(p, pen, levels[n]);
      row.pair = optimize_control(pn, cost_seq[n], space, starts, seed, params, opt, threads,
                                  warm);
      row.cost_gap = std::fabs(row.pair.cost - out.reference.cost);
      row.control_dist = p.inner_y.dist(row.pair.f, out.reference.f);
      row.ok = true;
      warm = &out.rows[n].pair.coeffs;
    } catch (const Error&) {
      row.ok = false;
    }
  }
  return out;
}

}  // namespace qvi
