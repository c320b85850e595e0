#include <benchmark/benchmark.h>

#include "npcmaj/barycenter.hpp"
#include "npcmaj/geometry.hpp"
#include "npcmaj/inequalities.hpp"
#include "npcmaj/lp.hpp"
#include "npcmaj/sampling.hpp"
#include "npcmaj/stochastic.hpp"
#include "npcmaj/wasserstein.hpp"

using namespace npcmaj;

namespace {

Space space_for(std::int64_t id) {
  switch (id) {
    case 0: return Space::euclidean(3);
    case 1: return Space::half_plane();
    case 2: return Space::spd(3);
    default: return Space::product({Space::euclidean(1), Space::half_plane()});
  }
}

void BM_Distance(benchmark::State& state) {
  const Space s = space_for(state.range(0));
  Rng rng(1);
  const Point p = random_point(s, rng), q = random_point(s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(distance(s, p, q));
  state.SetLabel(s.describe());
}
BENCHMARK(BM_Distance)->DenseRange(0, 3);

void BM_Barycenter(benchmark::State& state) {
  const Space s = space_for(state.range(0));
  Rng rng(2);
  DiscreteMeasure m;
  for (int i = 0; i < 8; ++i) m.atoms.push_back(random_point(s, rng));
  m.weights = random_probability(8, rng);
  BarycenterOptions o;
  o.force_iterative = true;
  for (auto _ : state) benchmark::DoNotOptimize(barycenter(s, m, o));
  state.SetLabel(s.describe());
}
BENCHMARK(BM_Barycenter)->DenseRange(0, 3);

// Transport LP between two uniform n-point measures on the line.
void BM_SimplexTransport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  LinearProgram lp;
  lp.constraints = Matrix(2 * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      lp.objective.push_back(rng.uniform());
      lp.constraints(i, i * n + j) = 1.0;
      lp.constraints(n + j, i * n + j) = 1.0;
    }
  lp.rhs.assign(2 * n, 1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(lp_solve(lp));
}
BENCHMARK(BM_SimplexTransport)->Arg(4)->Arg(8)->Arg(16);

void BM_Birkhoff(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const Matrix d = random_doubly_stochastic(n, n * n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_decompose(d));
}
BENCHMARK(BM_Birkhoff)->Arg(4)->Arg(8)->Arg(16);

void BM_W2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  const Space s = Space::wasserstein1d(n);
  const Measure1D a = random_point(s, rng).measure(), b = random_point(s, rng).measure();
  for (auto _ : state) benchmark::DoNotOptimize(w2_quantile(a, b));
}
BENCHMARK(BM_W2)->Arg(8)->Arg(64)->Arg(512);

void BM_W2Lp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  const Space s = Space::wasserstein1d(n);
  const auto a = DiscreteMeasureN::from_1d(random_point(s, rng).measure());
  const auto b = DiscreteMeasureN::from_1d(random_point(s, rng).measure());
  for (auto _ : state) benchmark::DoNotOptimize(w2_lp(a, b));
}
BENCHMARK(BM_W2Lp)->Arg(4)->Arg(8)->Arg(16);

void BM_FuzzMajorization(benchmark::State& state) {
  const Space s = space_for(state.range(0));
  FuzzOptions o;
  o.suites = {"majorization"};
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fuzz_suite(s, 7, 20, kViolationTol, o));
  state.SetLabel(s.describe());
}
BENCHMARK(BM_FuzzMajorization)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
