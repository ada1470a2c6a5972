#include "zdebias/zfilter.hpp"

#include <algorithm>
#include <future>
#include <unordered_set>

#include "zdebias/error.hpp"

namespace zdebias {

void FilterConfig::validate() const {
  z.validate();
  features.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

// Extract features for instances [begin, end), fanned out over
// cfg.threads workers. Results come back in input order, so downstream
// decisions are independent of the thread count.
std::vector<FeatureVector> extract_range(const std::vector<Instance>& instances,
                                         std::size_t begin, std::size_t end,
                                         const FilterConfig& cfg,
                                         const HypoPredictor* predictor) {
  const std::size_t count = end - begin;
  std::vector<FeatureVector> fvs(count);
  if (cfg.threads <= 1 || count < 64) {
    for (std::size_t i = 0; i < count; ++i)
      fvs[i] = extract_features(instances[begin + i], cfg.features, predictor);
    return fvs;
  }
  const std::size_t workers = std::min<std::size_t>(cfg.threads, count);
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    futures.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i)
        fvs[i] = extract_features(instances[begin + i], cfg.features, predictor);
    }));
  }
  for (auto& f : futures) f.get();
  return fvs;
}

bool intersects(const FeatureVector& fv, const BiasedFeatureSets& biased,
                Label label) {
  const auto& set = biased.lookup[to_index(label)];
  if (set.empty()) return false;
  for (const FeatureId& f : fv)
    if (set.contains(f)) return true;
  return false;
}

}  // namespace

FilterOutcome z_filter(const Dataset& input, const Dataset* seed,
                       const FilterConfig& cfg, const HypoPredictor* predictor) {
  cfg.validate();

  std::unordered_set<std::string> ids;
  if (seed)
    for (const Instance& s : seed->instances) ids.insert(s.id);
  for (const Instance& i : input.instances)
    if (seed && ids.contains(i.id))
      throw ConfigError("id \"" + i.id + "\" appears in both seed and input");

  FilterOutcome out;
  out.accepted.name = input.name + ".accepted";
  out.rejected.name = input.name + ".rejected";

  CountTable table;
  if (seed) {
    auto fvs = extract_range(seed->instances, 0, seed->size(), cfg, predictor);
    for (std::size_t i = 0; i < seed->size(); ++i) {
      table.accumulate(fvs[i], seed->instances[i].label);
      out.accepted.instances.push_back(seed->instances[i]);
    }
  }

  BiasedFeatureSets frozen;
  if (cfg.freeze_seed_bias) frozen = biased_features(table, cfg.z);

  const std::vector<Instance>& in = input.instances;
  std::size_t batch_index = 0;
  for (std::size_t offset = 0; offset < in.size(); offset += cfg.batch_size) {
    const std::size_t end = std::min(in.size(), offset + cfg.batch_size);

    if (cfg.recompute_each_batch) {
      CountTable rebuilt;
      auto fvs =
          extract_range(out.accepted.instances, 0, out.accepted.size(), cfg, predictor);
      for (std::size_t i = 0; i < out.accepted.size(); ++i)
        rebuilt.accumulate(fvs[i], out.accepted.instances[i].label);
      table = std::move(rebuilt);
    }

    const BiasedFeatureSets biased =
        cfg.freeze_seed_bias ? frozen : biased_features(table, cfg.z);

    auto fvs = extract_range(in, offset, end, cfg, predictor);
    BatchTrace trace{batch_index, 0, 0, biased.sizes()};
    for (std::size_t i = offset; i < end; ++i) {
      const FeatureVector& fv = fvs[i - offset];
      if (intersects(fv, biased, in[i].label)) {
        out.rejected.instances.push_back(in[i]);
        ++trace.rejected;
      } else {
        out.accepted.instances.push_back(in[i]);
        table.accumulate(fv, in[i].label);
        ++trace.accepted;
      }
    }
    out.trace.push_back(trace);
    ++batch_index;
  }

  out.final_biased = biased_features(table, cfg.z);
  return out;
}

Dataset construct(ConstructMode mode, const Dataset& d0, const Dataset& dg,
                  const FilterConfig& cfg, const HypoPredictor* predictor) {
  std::unordered_set<std::string> ids;
  for (const Instance& i : d0.instances) ids.insert(i.id);
  for (const Instance& i : dg.instances)
    if (ids.contains(i.id))
      throw ConfigError("id \"" + i.id + "\" appears in both d0 and dg");

  Dataset out;
  switch (mode) {
    case ConstructMode::z_aug: {
      // accepted already starts with the seed, so it is d0 followed by
      // the surviving dg part
      out = z_filter(dg, &d0, cfg, predictor).accepted;
      out.name = "z_aug";
      break;
    }
    case ConstructMode::par_z: {
      out = z_filter(d0, nullptr, cfg, predictor).accepted;
      auto zg = z_filter(dg, nullptr, cfg, predictor).accepted;
      out.instances.insert(out.instances.end(), zg.instances.begin(),
                           zg.instances.end());
      out.name = "par_z";
      break;
    }
    case ConstructMode::seq_z: {
      auto z0 = z_filter(d0, nullptr, cfg, predictor).accepted;
      out = z_filter(dg, &z0, cfg, predictor).accepted;
      out.name = "seq_z";
      break;
    }
    case ConstructMode::merge_plain: {
      out = d0;
      out.instances.insert(out.instances.end(), dg.instances.begin(),
                           dg.instances.end());
      out.name = "merge_plain";
      break;
    }
  }
  return out;
}

}  // namespace zdebias
