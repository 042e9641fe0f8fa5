#include <benchmark/benchmark.h>

#include "vpk/decision_tree.h"
#include "vpk/robustness.h"
#include "vpk/types.h"

namespace vpk {
namespace {

// Random-label trees grow until the leaves are pure, so the node count
// follows the number of training points.
DecisionTree RandomTree(int points, int dim) {
  Rng rng(11);
  std::vector<StateVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < points; ++i) {
    StateVector s(dim);
    for (int k = 0; k < dim; ++k) s[k] = UniformIn(rng, -1, 1);
    xs.push_back(s);
    ys.push_back(static_cast<int>(rng() % 3));
  }
  TreeConfig cfg;
  cfg.max_depth = 64;
  return FitClassifier(xs, ys, cfg);
}

void BM_EpsilonRobustness(benchmark::State& state) {
  const DecisionTree tree = RandomTree(static_cast<int>(state.range(0)), 5);
  Rng rng(3);
  std::vector<StateVector> queries;
  for (int i = 0; i < 256; ++i) {
    StateVector s(5);
    for (int k = 0; k < 5; ++k) s[k] = UniformIn(rng, -1, 1);
    queries.push_back(s);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EpsilonRobustness(tree, queries[i++ % queries.size()]).epsilon);
  }
  state.counters["nodes"] = tree.node_count();
}
BENCHMARK(BM_EpsilonRobustness)->Arg(50)->Arg(400)->Arg(4'000)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace vpk
