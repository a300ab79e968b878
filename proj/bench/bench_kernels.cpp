#include <benchmark/benchmark.h>

#include <random>

#include "polylearn/cdgbs.hpp"
#include "polylearn/labelling.hpp"
#include "polylearn/partition.hpp"

using namespace polylearn;

namespace {

const EmpiricalLabelling& learned(int m) {
  static EmpiricalLabelling two, three;
  EmpiricalLabelling& l = m == 2 ? two : three;
  if (l.label_count() == 0) {
    Uepp u = random_uepp(m, 4, 42);
    Oracle q = make_oracle(u, OracleKind::kLexicographic);
    l = cd_gbs({m, 4, m == 2 ? 0.02 : 0.1}, q).labelling;
    l.freeze();
  }
  return l;
}

std::vector<Point> grid(int N) {
  std::vector<Point> xs;
  for (int a = 0; a <= N; ++a)
    for (int b = 0; a + b <= N; ++b) xs.push_back(make_point({double(a) / N, double(b) / N}));
  return xs;
}

void BM_IsEpsClose(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const bool parallel = state.range(1) != 0;
  const auto& l = learned(m);
  const double eps = m == 2 ? 0.02 : 0.1;
  for (auto _ : state) {
    auto r = parallel ? is_eps_close(l, eps) : is_eps_close_serial(l, eps);
    benchmark::DoNotOptimize(r.is_close);
  }
}
BENCHMARK(BM_IsEpsClose)->ArgNames({"m", "parallel"})->Args({2, 0})->Args({2, 1})->Args({3, 0})->Args({3, 1})
    ->Unit(benchmark::kMillisecond);

void BM_VoronoiMasks(benchmark::State& state) {
  const bool parallel = state.range(1) != 0;
  const auto& l = learned(2);
  auto xs = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto v = parallel ? voronoi_masks(l, xs, Norm::kL2, 0.01) : voronoi_masks_serial(l, xs, Norm::kL2, 0.01);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_VoronoiMasks)->ArgNames({"N", "parallel"})->Args({40, 0})->Args({40, 1})->Args({80, 0})->Args({80, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
