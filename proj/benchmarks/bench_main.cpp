#include <benchmark/benchmark.h>

#include <random>

#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"
#include "fpdeconv/subordination.hpp"
#include "fpdeconv/transforms.hpp"

using namespace fpdeconv;

namespace {

transforms::WeightedAtomMeasure cauchy_atoms(std::size_t n) {
  Rng rng(17);
  std::cauchy_distribution<double> d(0.0, 5.0);
  std::vector<double> atoms(n);
  for (auto& a : atoms) a = d(rng);
  return transforms::WeightedAtomMeasure::uniform(std::move(atoms));
}

void BM_EmpiricalCauchy(benchmark::State& state) {
  const auto m = cauchy_atoms(static_cast<std::size_t>(state.range(0)));
  const transforms::Complex z(0.3, 2.01);
  for (auto _ : state) benchmark::DoNotOptimize(transforms::empirical_cauchy(m, z));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalCauchy)->RangeMultiplier(4)->Range(256, 16384);

void BM_FixedPoint(benchmark::State& state) {
  const auto m = cauchy_atoms(static_cast<std::size_t>(state.range(0)));
  const transforms::UpperHalfPoint z(0.3, 2.01);
  for (auto _ : state) benchmark::DoNotOptimize(subordination::solve_empirical(m, z, 1.0).w);
}
BENCHMARK(BM_FixedPoint)->RangeMultiplier(4)->Range(256, 4096);

void BM_FixedPointNewton(benchmark::State& state) {
  const auto m = cauchy_atoms(static_cast<std::size_t>(state.range(0)));
  const transforms::UpperHalfPoint z(0.3, 2.01);
  subordination::SolverOptions options;
  options.acceleration = subordination::Acceleration::kNewton;
  for (auto _ : state) benchmark::DoNotOptimize(subordination::solve_empirical(m, z, 1.0, options).w);
}
BENCHMARK(BM_FixedPointNewton)->RangeMultiplier(4)->Range(256, 4096);

void BM_MatrixEigensolve(benchmark::State& state) {
  const dbm::InitialLaw law(dbm::CauchyLaw{5.0});
  dbm::MatrixOptions options;
  options.record_eta_star = false;
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dbm::simulate_dyson_matrix(law, static_cast<std::size_t>(state.range(0)), 1.0, rng, options));
  }
}
BENCHMARK(BM_MatrixEigensolve)->Arg(100)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const deconv::Deconvolver deconvolver(deconv::EstimatorConfig{});
  const auto prepared = deconvolver.prepare(cauchy_atoms(1000));
  for (auto _ : state) benchmark::DoNotOptimize(deconvolver.assemble(prepared, 1.0));
}
BENCHMARK(BM_Assemble)->Unit(benchmark::kMillisecond);

void BM_Prepare(benchmark::State& state) {
  const deconv::Deconvolver deconvolver(deconv::EstimatorConfig{});
  const auto m = cauchy_atoms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(deconvolver.prepare(m));
}
BENCHMARK(BM_Prepare)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
