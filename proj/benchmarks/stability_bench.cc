#include <chrono>
#include <cmath>

#include <benchmark/benchmark.h>

#include "vpk/cartpole.h"
#include "vpk/oracle.h"
#include "vpk/stability.h"
#include "vpk/viper.h"

namespace vpk {
namespace {

// The 3-node linear-leaf cart-pole tree extracted from the iLQR oracle, its
// certificate and the certified closed loop, built once.
struct Problem {
  StabilityCertificate cert;
  PolynomialMap closed;
  double certify_seconds = 0.0;
};

const Problem& CartPoleProblem() {
  static const Problem problem = [] {
    CartPoleParams p;
    p.continuous_actions = true;
    CartPoleEnv env(p);
    ExtractionConfig cfg;
    cfg.iterations = 5;
    cfg.rollouts = 5;
    cfg.seed = 3;
    cfg.eval_rollouts = 10;
    cfg.tree.max_depth = 1;
    cfg.tree.leaf_kind = LeafKind::kLinear;
    cfg.tree.origin_margin = 0.22;
    cfg.tree.fit_intercept = false;
    const ExtractionResult r = Viper(env, *MakeOracle("ilqr", env), cfg);
    DecisionTree tree = r.best;
    for (const DecisionTree& t : r.candidates) {
      if (t.node_count() == 3) {
        tree = t;
        break;
      }
    }
    const PolynomialMap f_env = CartPoleTaylor(p, 5);
    Problem out;
    out.cert = *TreeRoa(tree, f_env).certificate;
    out.closed = CloseLoop(f_env, tree.nodes()[out.cert.leaf_node].coef);
    const auto t0 = std::chrono::steady_clock::now();
    CertifyRegion(out.cert.P, out.closed, out.cert.rho);
    out.certify_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return problem;
}

void BM_CertifyRegion(benchmark::State& state) {
  const Problem& pb = CartPoleProblem();
  std::int64_t boxes = 0;
  for (auto _ : state) {
    const CertifyResult r = CertifyRegion(pb.cert.P, pb.closed, pb.cert.rho);
    if (!r.certified()) state.SkipWithError("region not certified");
    boxes = r.stats.boxes;
  }
  state.counters["boxes"] = static_cast<double>(boxes);
  state.counters["rho"] = pb.cert.rho;
}
BENCHMARK(BM_CertifyRegion)->Unit(benchmark::kMillisecond);

// Grid points spaced at the certificate's excluded radius delta: the grid
// resolves the scale the certificate covers. The full grid is far too large to
// enumerate, so a prefix is timed and the total extrapolated. The prefix lies
// in a corner of the bounding box, outside the ellipsoid where points are
// cheapest, so the estimate is a lower bound.
void BM_EnumerativeAtDelta(benchmark::State& state) {
  const Problem& pb = CartPoleProblem();
  const std::int64_t prefix = state.range(0);
  EnumerativeResult r;
  double seconds = 0.0;
  std::int64_t evaluated = 0;
  for (auto _ : state) {
    const auto t0 = std::chrono::steady_clock::now();
    r = EnumerativeCheck(pb.cert.P, pb.closed, pb.cert.rho, pb.cert.delta, pb.cert.delta, prefix);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    evaluated += r.evaluated;
  }
  const double full_seconds = seconds / static_cast<double>(evaluated) * r.grid_points;
  state.counters["grid_points"] = static_cast<double>(r.grid_points);
  state.counters["est_full_grid_s"] = full_seconds;
  state.counters["certify_s"] = pb.certify_seconds;
  state.counters["slowdown_vs_certify"] = full_seconds / pb.certify_seconds;
}
BENCHMARK(BM_EnumerativeAtDelta)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

// Coarser grid: spacing equal to the side of the finest box the
// branch-and-bound created. This grid is small enough to enumerate in full
// but only samples the region.
void BM_EnumerativeAtFinestBox(benchmark::State& state) {
  const Problem& pb = CartPoleProblem();
  const CertifyResult cr = CertifyRegion(pb.cert.P, pb.closed, pb.cert.rho);
  const Eigen::VectorXd extent = EllipsoidExtent(pb.cert.P, pb.cert.rho);
  double volume = 1.0;
  for (int i = 0; i < extent.size(); ++i) volume *= 2.0 * extent[i];
  const double step =
      std::pow(volume / std::ldexp(1.0, cr.stats.max_depth), 1.0 / static_cast<double>(extent.size()));
  EnumerativeResult r;
  for (auto _ : state) r = EnumerativeCheck(pb.cert.P, pb.closed, pb.cert.rho, step, pb.cert.delta);
  state.counters["grid_step"] = step;
  state.counters["grid_points"] = static_cast<double>(r.grid_points);
  state.counters["violations"] = static_cast<double>(r.violations.size());
}
BENCHMARK(BM_EnumerativeAtFinestBox)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace vpk
