#include "vpk/sweep.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "vpk/rollout.h"

namespace vpk {

void SweepConfig::Validate() const {
  if (depths.empty()) throw std::invalid_argument("sweep needs at least one depth");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  if (!run_viper && !run_dagger) throw std::invalid_argument("sweep needs an algorithm");
  if (eval_rollouts < 1) throw std::invalid_argument("sweep needs eval_rollouts >= 1");
  for (int d : depths) {
    if (d < 0) throw std::invalid_argument("sweep depths must be nonnegative");
  }
  extraction.Validate();
}

std::vector<SweepPoint> RunSweep(const Environment& env, const Oracle& oracle,
                                 const SweepConfig& config) {
  config.Validate();
  std::vector<SweepPoint> out;
  for (std::uint64_t seed : config.seeds) {
    for (int depth : config.depths) {
      ExtractionConfig ec = config.extraction;
      ec.seed = seed;
      ec.tree.max_depth = depth;
      for (int algo = 0; algo < 2; ++algo) {
        if ((algo == 0 && !config.run_viper) || (algo == 1 && !config.run_dagger)) continue;
        const ExtractionResult r = algo == 0 ? Viper(env, oracle, ec) : Dagger(env, oracle, ec);
        auto tree = std::make_shared<const DecisionTree>(r.best);
        SweepPoint p;
        p.algorithm = algo == 0 ? "viper" : "dagger";
        p.seed = seed;
        p.max_depth = depth;
        p.nodes = r.best.node_count();
        p.mean_reward = MeanReward(env, TreePolicy(tree), config.eval_rollouts, config.eval_seed,
                                   ec.max_steps);
        out.push_back(p);
      }
    }
  }
  return out;
}

std::string SweepCsv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << "algorithm,seed,max_depth,nodes,mean_reward,best_reward_so_far\n";
  std::map<std::pair<std::string, std::uint64_t>, double> best;
  for (const SweepPoint& p : points) {
    auto [it, inserted] = best.try_emplace({p.algorithm, p.seed}, p.mean_reward);
    if (!inserted) it->second = std::max(it->second, p.mean_reward);
    os << p.algorithm << ',' << p.seed << ',' << p.max_depth << ',' << p.nodes << ','
       << p.mean_reward << ',' << it->second << '\n';
  }
  return os.str();
}

namespace {

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<ThresholdRow> CompareAtThresholds(const std::vector<SweepPoint>& points) {
  std::vector<ThresholdRow> rows;
  if (points.empty()) return rows;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<std::uint64_t> seeds;
  for (const SweepPoint& p : points) {
    lo = std::min(lo, p.mean_reward);
    hi = std::max(hi, p.mean_reward);
    if (std::find(seeds.begin(), seeds.end(), p.seed) == seeds.end()) seeds.push_back(p.seed);
  }
  for (double r = std::ceil(lo); r <= std::floor(hi); r += 1.0) {
    ThresholdRow row{r, 0.0, 0.0};
    bool common = true;
    for (const char* algo : {"viper", "dagger"}) {
      std::vector<double> minima;
      for (std::uint64_t seed : seeds) {
        int best = std::numeric_limits<int>::max();
        for (const SweepPoint& p : points) {
          if (p.algorithm == algo && p.seed == seed && p.mean_reward >= r) best = std::min(best, p.nodes);
        }
        if (best == std::numeric_limits<int>::max()) {
          common = false;
          break;
        }
        minima.push_back(best);
      }
      if (!common) break;
      (std::string(algo) == "viper" ? row.viper_median_nodes : row.dagger_median_nodes) = Median(minima);
    }
    if (common) rows.push_back(row);
  }
  return rows;
}

std::string ThresholdCsv(const std::vector<ThresholdRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "threshold,viper_median_nodes,dagger_median_nodes\n";
  for (const ThresholdRow& r : rows) {
    os << r.threshold << ',' << r.viper_median_nodes << ',' << r.dagger_median_nodes << '\n';
  }
  return os.str();
}

}  // namespace vpk
