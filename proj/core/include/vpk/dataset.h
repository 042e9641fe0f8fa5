#pragma once

#include <cstdint>
#include <vector>

#include "vpk/action.h"
#include "vpk/types.h"

namespace vpk {

struct DatasetEntry {
  StateVector state;
  /// The oracle's action at `state`.
  Action action;
  /// ell~(state); 1 for unweighted aggregation.
  double weight = 1.0;
};

/// VIPER's aggregate of oracle-labelled states.
class AggregatedDataset {
 public:
  /// Throws std::invalid_argument for negative or non-finite weights and for
  /// states whose dimension differs from earlier entries.
  void Add(DatasetEntry entry);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<DatasetEntry>& entries() const { return entries_; }
  double total_weight() const { return total_weight_; }

 private:
  std::vector<DatasetEntry> entries_;
  double total_weight_ = 0.0;
};

/// Draws `size` indices i.i.d. with replacement, with probability
/// proportional to `weights`. When all weights are equal the draw is
/// floor(u n), so any uniform weighting yields the same indices. Throws
/// std::invalid_argument for size < 1, an empty list, or all-zero weights.
std::vector<std::size_t> ResampleIndices(const std::vector<double>& weights,
                                         std::size_t size, std::uint64_t seed);

/// Weighted resample of a dataset's entries.
std::vector<DatasetEntry> Resample(const AggregatedDataset& dataset,
                                   std::size_t size, std::uint64_t seed);

}  // namespace vpk
