#include <benchmark/benchmark.h>

#include "qvi/fem_contact.hpp"
#include "qvi/fem_heat.hpp"

namespace {

qvi::HeatAssembly heat_fixture(std::size_t n) {
  qvi::Mesh2D mesh = qvi::unit_square(n, n);
  qvi::HeatData data = qvi::sample_heat_data(
      mesh, [](double x, double) { return -8.0 + 8.0 * x; },
      [](double, double) { return 1.0; }, [](double, double) { return 0.3; });
  return qvi::assemble_heat(mesh, data);
}

void BM_spmv(benchmark::State& state) {
  qvi::HeatAssembly ha = heat_fixture(static_cast<std::size_t>(state.range(0)));
  qvi::Vec x(static_cast<std::size_t>(ha.problem.dim()), 1.0);
  for (auto _ : state) {
    qvi::Vec y = qvi::spmv(ha.stiffness, x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_spmv)->Arg(32)->Arg(64);

void BM_cg_gram(benchmark::State& state) {
  qvi::HeatAssembly ha = heat_fixture(static_cast<std::size_t>(state.range(0)));
  qvi::Rng rng(11);
  qvi::Vec rhs = rng.vector(static_cast<std::size_t>(ha.problem.dim()), 1.0);
  for (auto _ : state) {
    qvi::Vec x = ha.problem.inner_x.riesz(rhs);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_cg_gram)->Arg(32)->Arg(64);

void BM_heat_vi(benchmark::State& state) {
  qvi::HeatAssembly ha = heat_fixture(static_cast<std::size_t>(state.range(0)));
  qvi::SolverParams params;
  for (auto _ : state) {
    qvi::Solution sol = qvi::solve_qvi(ha.problem, params);
    benchmark::DoNotOptimize(sol.u.data());
  }
}
BENCHMARK(BM_heat_vi)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_heat_penalized(benchmark::State& state) {
  qvi::HeatAssembly ha = heat_fixture(static_cast<std::size_t>(state.range(0)));
  qvi::GalerkinProblem pen = qvi::penalized_problem(ha.problem, ha.penalty, 0.25);
  qvi::SolverParams params;
  for (auto _ : state) {
    qvi::Solution sol = qvi::solve_qvi(pen, params);
    benchmark::DoNotOptimize(sol.u.data());
  }
}
BENCHMARK(BM_heat_penalized)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_contact_qvi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  qvi::Mesh2D mesh = qvi::rectangle(2.0, 1.0, 2 * n, n);
  qvi::ElasticityData data;
  qvi::ContactAssembly ca = qvi::assemble_contact(mesh, data);
  qvi::SolverParams params;
  for (auto _ : state) {
    qvi::Solution sol = qvi::solve_qvi(ca.problem, params);
    benchmark::DoNotOptimize(sol.u.data());
  }
}
BENCHMARK(BM_contact_qvi)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
