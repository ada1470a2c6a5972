#include <benchmark/benchmark.h>

#include "zdebias/features.hpp"
#include "zdebias/synth.hpp"
#include "zdebias/zfilter.hpp"
#include "zdebias/zstats.hpp"

using namespace zdebias;

namespace {

Dataset make_corpus(std::size_t n) {
  std::vector<BiasSpec> specs;
  for (int m = 0; m < 4; ++m)
    specs.push_back({"bm" + std::to_string(m), Placement::hypothesis,
                     label_from_index(m % 3),
                     static_cast<std::uint32_t>(n / 20), 0.8,
                     static_cast<std::uint64_t>(m + 1)});
  return generate(specs, n - 4 * (n / 20), 200, 123);
}

void bm_tokenize(benchmark::State& state) {
  const std::string text =
      "A man, wearing a well-known red jacket, is sleeping on the bench.";
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
}
BENCHMARK(bm_tokenize);

void bm_extract_features(benchmark::State& state) {
  Instance inst;
  inst.premise = "a man wearing a red jacket is sleeping on the bench";
  inst.hypothesis = "the man is asleep outside";
  inst.label = Label::entailment;
  FeatureConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(inst, cfg));
}
BENCHMARK(bm_extract_features);

void bm_accumulate(benchmark::State& state) {
  const auto d = make_corpus(static_cast<std::size_t>(state.range(0)));
  FeatureConfig cfg;
  std::vector<FeatureVector> fvs;
  fvs.reserve(d.size());
  for (const auto& inst : d.instances) fvs.push_back(extract_features(inst, cfg));
  for (auto _ : state) {
    CountTable t;
    for (std::size_t i = 0; i < d.size(); ++i)
      t.accumulate(fvs[i], d.instances[i].label);
    benchmark::DoNotOptimize(t);
  }
  state.SetItemsProcessed(state.iterations() * d.size());
}
BENCHMARK(bm_accumulate)->Arg(10000);

void bm_biased_features(benchmark::State& state) {
  const auto d = make_corpus(50000);
  FeatureConfig fcfg;
  CountTable t;
  for (const auto& inst : d.instances)
    t.accumulate(extract_features(inst, fcfg), inst.label);
  ZConfig zcfg;
  for (auto _ : state) benchmark::DoNotOptimize(biased_features(t, zcfg));
}
BENCHMARK(bm_biased_features);

void bm_z_filter(benchmark::State& state) {
  const auto d = make_corpus(static_cast<std::size_t>(state.range(0)));
  FilterConfig cfg;
  cfg.batch_size = 10000;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(z_filter(d, nullptr, cfg));
  state.SetItemsProcessed(state.iterations() * d.size());
}
BENCHMARK(bm_z_filter)->Args({50000, 1})->Args({50000, 4})->Args({50000, 8});

}  // namespace

BENCHMARK_MAIN();
