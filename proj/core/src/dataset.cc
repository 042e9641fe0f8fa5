#include "vpk/dataset.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpk {

void AggregatedDataset::Add(DatasetEntry entry) {
  if (!(entry.weight >= 0.0) || !std::isfinite(entry.weight)) {
    throw std::invalid_argument("dataset weights must be finite and nonnegative");
  }
  if (!entries_.empty() && entry.state.size() != entries_.front().state.size()) {
    throw std::invalid_argument("dataset states must share one dimension");
  }
  total_weight_ += entry.weight;
  entries_.push_back(std::move(entry));
}

std::vector<std::size_t> ResampleIndices(const std::vector<double>& weights,
                                         std::size_t size, std::uint64_t seed) {
  if (size < 1) throw std::invalid_argument("resample size must be >= 1");
  if (weights.empty()) throw std::invalid_argument("cannot resample an empty dataset");
  const std::size_t n = weights.size();
  const bool uniform = std::all_of(weights.begin(), weights.end(),
                                   [&](double w) { return w == weights.front(); });
  if (uniform && weights.front() == 0.0) {
    throw std::invalid_argument("all resampling weights are zero");
  }
  Rng rng(seed);
  std::vector<std::size_t> out(size);
  if (uniform) {
    for (std::size_t k = 0; k < size; ++k) {
      out[k] = std::min(n - 1, static_cast<std::size_t>(Uniform01(rng) * n));
    }
    return out;
  }
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += weights[i];
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("all resampling weights are zero");
  for (std::size_t k = 0; k < size; ++k) {
    const double x = Uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    // x can round up to the total; fall back to the last positive weight.
    if (i >= n) {
      i = n - 1;
      while (weights[i] == 0.0) --i;
    }
    out[k] = i;
  }
  return out;
}

std::vector<DatasetEntry> Resample(const AggregatedDataset& dataset, std::size_t size,
                                   std::uint64_t seed) {
  std::vector<double> weights;
  weights.reserve(dataset.size());
  for (const DatasetEntry& e : dataset.entries()) weights.push_back(e.weight);
  std::vector<DatasetEntry> out;
  out.reserve(size);
  for (std::size_t i : ResampleIndices(weights, size, seed)) out.push_back(dataset.entries()[i]);
  return out;
}

}  // namespace vpk
