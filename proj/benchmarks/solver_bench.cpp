#include "hyperbreg/regularity.hpp"
#include "hyperbreg/waveq1d.hpp"

#include <benchmark/benchmark.h>

using namespace hyperbreg;

namespace {

void BM_AssembleStiffness(benchmark::State& state) {
  const Mesh1D mesh(static_cast<int>(state.range(0)));
  const WaveCase wave = manufactured_case("timedep-sine");
  const ProblemData p = assemble_wave_problem(mesh, wave.a, wave.f, wave.u0, wave.u1, 1.0);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.A.eval(t, 0));
    t += 1e-3;
    if (t > 1.0) t = 0.0;
  }
}
BENCHMARK(BM_AssembleStiffness)->Arg(33)->Arg(129);

void BM_ForwardSolve(benchmark::State& state) {
  const Mesh1D mesh(static_cast<int>(state.range(0)));
  const WaveCase wave = manufactured_case("timedep-sine");
  const ProblemData p = assemble_wave_problem(mesh, wave.a, wave.f, wave.u0, wave.u1, 1.0);
  const TimeGrid grid(1.0, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_forward(p, grid, 1e-10));
  }
}
BENCHMARK(BM_ForwardSolve)->Args({33, 128})->Args({65, 256});

void BM_DerivativeSolveK2(benchmark::State& state) {
  const Mesh1D mesh(static_cast<int>(state.range(0)));
  const WaveCase wave = manufactured_case("poly-time");
  const ProblemData p = assemble_wave_problem(mesh, wave.a, wave.f, wave.u0, wave.u1, 1.0);
  const TimeGrid grid(1.0, 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_derivative(p, 2, grid, 1e-10));
  }
}
BENCHMARK(BM_DerivativeSolveK2)->Arg(33);

void BM_CompatRecursion(benchmark::State& state) {
  const Mesh1D mesh(65);
  const WaveCase wave = manufactured_case("poly-time");
  const ProblemData p = assemble_wave_problem(mesh, wave.a, wave.f, wave.u0, wave.u1, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compatible_initial_values(p, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_CompatRecursion)->Arg(1)->Arg(3);

}  // namespace
