#include <benchmark/benchmark.h>

#include "rolljoint/oracle.hpp"
#include "rolljoint/solver_displacement.hpp"
#include "rolljoint/solver_tension.hpp"

using namespace rolljoint;

namespace {

std::vector<ExternalLoad> tip_pull(std::size_t n, double fx) {
  return {{ConstantWorkspace{{0.0, Vec2(fx, 0.0)}, Vec2::Zero()}, n - 1}};
}

void BM_NewtonStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MechanismDesign d = make_uniform_chain(n);
  const auto loads = tip_pull(n, 0.02);
  const Configuration c = balance_contact_forces(d, initial_configuration(d), TendonPair(1.1, 1), loads);
  for (auto _ : state) benchmark::DoNotOptimize(newton_step(d, c, TendonPair(1.1, 1), loads));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NewtonStep)->RangeMultiplier(2)->Range(4, 64)->Arg(50)->Complexity(benchmark::oN);

void BM_SolveTension(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MechanismDesign d = make_uniform_chain(n);
  const auto loads = tip_pull(n, 0.02);
  int iterations = 0;
  for (auto _ : state) {
    const auto sol = solve_tension(d, TendonPair(1.1, 1), loads);
    iterations = sol.report.iterations;
  }
  state.counters["newton_iters"] = iterations;
}
BENCHMARK(BM_SolveTension)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_DenseSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MechanismDesign d = make_uniform_chain(n);
  const auto loads = tip_pull(n, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::dense_solve(d, TendonPair(1.1, 1), loads));
}
BENCHMARK(BM_DenseSolve)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_TendonJacobian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MechanismDesign d = make_uniform_chain(n);
  const auto sol = solve_tension(d, TendonPair(1.1, 1), {});
  for (auto _ : state) benchmark::DoNotOptimize(tendon_jacobian(d, sol.config, TendonPair(1.1, 1), {}));
}
BENCHMARK(BM_TendonJacobian)->Arg(5)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
