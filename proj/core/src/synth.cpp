#include "zdebias/synth.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

#include "zdebias/error.hpp"

namespace zdebias {

namespace {

std::string background_token(std::size_t i) { return "w" + std::to_string(i); }

std::string join(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t count,
                                       std::size_t vocab_size) {
  std::vector<std::string> toks;
  toks.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    toks.push_back(background_token(rng() % vocab_size));
  return toks;
}

// Explicit Fisher-Yates so the shuffle is identical across standard
// library implementations.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

double expected_z(const BiasSpec& spec) {
  const double p0 = 1.0 / 3.0;
  const double n = static_cast<double>(spec.occurrences);
  return (spec.target_fraction - p0) / std::sqrt(p0 * (1.0 - p0) / n);
}

std::uint64_t realized_target_count(const BiasSpec& spec) {
  return static_cast<std::uint64_t>(
      std::llround(spec.target_fraction * static_cast<double>(spec.occurrences)));
}

Dataset generate(const std::vector<BiasSpec>& specs,
                 std::size_t background_count, std::size_t vocab_size,
                 std::uint64_t rng_seed, bool balanced_background) {
  if (vocab_size == 0) throw ConfigError("vocab_size must be >= 1");
  std::unordered_set<std::string> markers;
  for (const BiasSpec& spec : specs) {
    if (spec.marker.empty()) throw ConfigError("marker must be non-empty");
    if (!(spec.target_fraction >= 0.0 && spec.target_fraction <= 1.0))
      throw ConfigError("target_fraction must lie in [0,1]");
    if (spec.occurrences < 1) throw ConfigError("occurrences must be >= 1");
    if (!markers.insert(spec.marker).second)
      throw ConfigError("duplicate marker \"" + spec.marker + "\"");
    for (std::size_t i = 0; i < vocab_size; ++i)
      if (spec.marker == background_token(i))
        throw ConfigError("marker \"" + spec.marker +
                          "\" collides with the background vocabulary");
  }

  std::mt19937_64 rng(rng_seed);
  std::vector<Instance> instances;
  instances.reserve(background_count);

  std::string premise, hypothesis;
  for (std::size_t i = 0; i < background_count; ++i) {
    Instance inst;
    if (!balanced_background || i % 3 == 0) {
      premise = join(random_tokens(rng, 5 + rng() % 8, vocab_size));
      hypothesis = join(random_tokens(rng, 3 + rng() % 6, vocab_size));
    }
    inst.premise = premise;
    inst.hypothesis = hypothesis;
    inst.label = balanced_background
                     ? label_from_index(static_cast<int>(i % 3))
                     : label_from_index(static_cast<int>(rng() % 3));
    inst.source = Source::generated;
    instances.push_back(std::move(inst));
  }

  for (const BiasSpec& spec : specs) {
    std::mt19937_64 srng(spec.rng_seed);
    const std::uint64_t n = spec.occurrences;
    const std::uint64_t target = realized_target_count(spec);
    const std::uint64_t rem = n - target;
    const int t = to_index(spec.target_label);
    for (std::uint64_t j = 0; j < n; ++j) {
      Instance inst;
      auto prem = random_tokens(srng, 5 + srng() % 8, vocab_size);
      auto hyp = random_tokens(srng, 3 + srng() % 6, vocab_size);
      auto& side = spec.placement == Placement::hypothesis ? hyp : prem;
      side.insert(side.begin() + srng() % (side.size() + 1), spec.marker);
      inst.premise = join(prem);
      inst.hypothesis = join(hyp);
      // quota-based labels: first `target` carry the target label, the
      // remainder splits evenly over the other two
      if (j < target) inst.label = spec.target_label;
      else if (j - target < rem / 2) inst.label = label_from_index((t + 1) % 3);
      else inst.label = label_from_index((t + 2) % 3);
      inst.source = Source::generated;
      instances.push_back(std::move(inst));
    }
  }

  std::mt19937_64 shuffle_rng(rng_seed ^ 0x9e3779b97f4a7c15ULL);
  deterministic_shuffle(instances, shuffle_rng);

  Dataset out{"synth", std::move(instances)};
  for (std::size_t i = 0; i < out.instances.size(); ++i)
    out.instances[i].id = "synth:" + std::to_string(i);
  return out;
}

}  // namespace zdebias
