#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zdebias/instance.hpp"
#include "zdebias/label.hpp"

namespace zdebias {

enum class Placement { hypothesis, premise };

/// A planted feature-label correlation: `occurrences` instances contain
/// `marker`, and exactly round(target_fraction * occurrences) of them
/// carry target_label (quota-based, not sampled, so the resulting
/// z-score is analytically exact).
struct BiasSpec {
  std::string marker;
  Placement placement = Placement::hypothesis;
  Label target_label = Label::entailment;
  std::uint32_t occurrences = 1;   // n
  double target_fraction = 1.0;    // p
  std::uint64_t rng_seed = 0;
};

/// Background instances draw tokens uniformly from a vocabulary
/// {"w0".."w<vocab_size-1>"} and labels uniformly; each spec adds its
/// marker instances; the whole output is shuffled by rng_seed. Fully
/// deterministic given the seeds.
///
/// With balanced_background the background is emitted in triples that
/// share their text across the three labels, so every background
/// feature is exactly label-balanced and only the planted markers carry
/// signal.
///
/// Throws ConfigError if a marker collides with the vocabulary or with
/// another spec's marker.
Dataset generate(const std::vector<BiasSpec>& specs,
                 std::size_t background_count, std::size_t vocab_size,
                 std::uint64_t rng_seed, bool balanced_background = false);

/// Analytic z for the planted construction:
/// (p - 1/3) / sqrt((1/3)(2/3) / n).
double expected_z(const BiasSpec& spec);

/// The exact target-label count the construction realizes:
/// round(p * n). Feeds oracle checks against full_report.
std::uint64_t realized_target_count(const BiasSpec& spec);

}  // namespace zdebias
