#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zdebias/features.hpp"
#include "zdebias/instance.hpp"
#include "zdebias/zstats.hpp"

namespace zdebias {

/// Per-token unlikelihood mask for one rejected instance.
/// Bit 1 = likelihood token, 0 = unlikelihood token.
struct MaskedInstance {
  std::string id;
  std::vector<std::string> premise_tokens;
  std::vector<std::string> hypothesis_tokens;
  std::vector<std::uint8_t> premise_mask;
  std::vector<std::uint8_t> hypothesis_mask;
  std::vector<FeatureId> triggering_features;  // subset of B(label)

  bool operator==(const MaskedInstance&) const = default;
};

struct MaskConfig {
  FeatureConfig features;
  /// Premise-namespace n-gram triggers mask premise token positions,
  /// mirroring the hypothesis rule. When off they fall back to the
  /// all-hypothesis rule like any other non-hypothesis-n-gram feature.
  bool mask_premise_ngrams = true;
};

/// Mask rule per triggering feature (feature present in the instance
/// and in B(label)):
///   - hypothesis n-gram: zero exactly the matching token positions,
///     every occurrence;
///   - premise n-gram: same on the premise side (configurable);
///   - anything else (length, ratio, overlap, hypo-only-pred, null):
///     zero the whole hypothesis (absorbing rule).
/// Throws ConfigError when the instance has no triggering feature,
/// i.e. it was not a rejection.
MaskedInstance compute_mask(const Instance& inst,
                            const BiasedFeatureSets& biased,
                            const MaskConfig& cfg,
                            const HypoPredictor* predictor = nullptr);

/// Line-delimited mask file: a versioned header line followed by one
/// JSON record per rejected instance, in input order. Instances with no
/// triggering feature for their label get an error record instead of a
/// mask, so one bad row never aborts the file.
void emit_mask_file(const Dataset& rejected, const BiasedFeatureSets& biased,
                    const MaskConfig& cfg, const std::filesystem::path& path,
                    const HypoPredictor* predictor = nullptr);

/// Round-trip parse of an emitted mask file.
std::vector<MaskedInstance> read_mask_file(const std::filesystem::path& path);

}  // namespace zdebias
