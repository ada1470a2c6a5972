#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "zdebias/features.hpp"
#include "zdebias/instance.hpp"
#include "zdebias/zstats.hpp"

namespace zdebias {

struct FilterConfig {
  ZConfig z;
  FeatureConfig features;
  std::size_t batch_size = 10000;
  /// Compatibility mode: keep the biased sets frozen at the seed
  /// snapshot instead of updating them every batch.
  bool freeze_seed_bias = false;
  /// Reference mode: rebuild the count table from the accepted set at
  /// every batch boundary instead of updating it incrementally. Must
  /// produce bit-identical outcomes; exists as a cross-check.
  bool recompute_each_batch = false;
  int threads = 1;  // worker threads for feature extraction

  void validate() const;
};

struct BatchTrace {
  std::size_t batch_index = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::array<std::size_t, 3> biased_sizes{};  // |B(l)| used for this batch
};

struct FilterOutcome {
  Dataset accepted;   // Z; in conditional mode this starts with the seed
  Dataset rejected;   // Z-
  BiasedFeatureSets final_biased;  // computed on the final table
  std::vector<BatchTrace> trace;
};

/// Iterative z-filtering. Per batch of batch_size instances in input
/// order: recompute the biased sets from the current table, then accept
/// an instance iff its features are disjoint from B(label); accepted
/// instances immediately feed the table. Seed instances (conditional
/// mode) are accumulated up front and never re-filtered.
///
/// Throws ConfigError on id collisions between seed and input.
FilterOutcome z_filter(const Dataset& input, const Dataset* seed,
                       const FilterConfig& cfg,
                       const HypoPredictor* predictor = nullptr);

enum class ConstructMode { z_aug, par_z, seq_z, merge_plain };

/// Combine an original dataset d0 and a synthetic dataset dg:
///   z_aug:       d0 kept as is, dg conditionally filtered with d0 as seed
///   par_z:       both filtered independently, then merged
///   seq_z:       filter d0, then conditionally filter dg on that result
///   merge_plain: plain concatenation, no filtering
/// Output order: d0-part first, then dg-part, each in original order.
Dataset construct(ConstructMode mode, const Dataset& d0, const Dataset& dg,
                  const FilterConfig& cfg,
                  const HypoPredictor* predictor = nullptr);

}  // namespace zdebias
