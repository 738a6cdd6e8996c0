// Serial reference against the OpenMP kernels. Thread count follows
// OMP_NUM_THREADS; on a single core both variants should time alike.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "spdebem/basis.hpp"
#include "spdebem/bem.hpp"
#include "spdebem/spde.hpp"

using namespace spdebem;

namespace {

const Complex kKappa(6.5, 0.05);

void BM_AssembleParallel(benchmark::State& state) {
  const NepMatrixAssembler a(BoundaryMesh(peanut_curve(), static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(a.assemble(kKappa));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_AssembleSerial(benchmark::State& state) {
  const NepMatrixAssembler a(BoundaryMesh(peanut_curve(), static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(a.assemble_serial(kKappa));
}

std::vector<Point> interior_points(int r) {
  std::vector<Point> pts;
  const auto mask = inside_mask(peanut_curve(), r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (mask[static_cast<std::size_t>(i * r + j)]) pts.push_back(grid_point(r, i, j));
    }
  }
  return pts;
}

void BM_EvaluateParallel(benchmark::State& state) {
  const InteriorEvaluator ev(BoundaryMesh(peanut_curve(), 48));
  const auto pts = interior_points(static_cast<int>(state.range(0)));
  const ComplexMatrix dens = ComplexMatrix::Ones(ev.mesh().dof(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate(kKappa, dens, pts));
  state.counters["points"] = static_cast<double>(pts.size());
}

void BM_EvaluateSerial(benchmark::State& state) {
  const InteriorEvaluator ev(BoundaryMesh(peanut_curve(), 48));
  const auto pts = interior_points(static_cast<int>(state.range(0)));
  const ComplexMatrix dens = ComplexMatrix::Ones(ev.mesh().dof(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate_serial(kKappa, dens, pts));
  state.counters["points"] = static_cast<double>(pts.size());
}

SpdeProblem batch_problem() {
  static const OrthonormalBasis full = disc_bessel_basis(20, 41);
  SpdeProblem p;
  p.basis = std::make_shared<const PackedBasis>(full);
  p.initial = p.basis->pack(bump_initial(0.4, 0.6, 0.3, 0.5, 41, full.mask));
  p.nonlinearity = Nonlinearity::rational();
  p.T = 0.1;
  p.M = 50;
  return p;
}

// Realization batch with the ambient thread count, then pinned to one thread.
void BM_RealizationsParallel(benchmark::State& state) {
  const SpdeProblem p = batch_problem();
  for (auto _ : state) benchmark::DoNotOptimize(final_coefficients(p, static_cast<int>(state.range(0))));
}

void BM_RealizationsSerial(benchmark::State& state) {
  const SpdeProblem p = batch_problem();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  for (auto _ : state) benchmark::DoNotOptimize(final_coefficients(p, static_cast<int>(state.range(0))));
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK(BM_AssembleParallel)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleSerial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RealizationsParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RealizationsSerial)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
