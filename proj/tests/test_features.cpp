#include <doctest.h>

#include <algorithm>
#include <random>

#include "zdebias/error.hpp"
#include "zdebias/features.hpp"

using namespace zdebias;

namespace {

bool has(const FeatureVector& fv, const std::string& f) {
  return std::find(fv.begin(), fv.end(), f) != fv.end();
}

Instance make(const std::string& premise, const std::string& hypothesis,
              Label label = Label::entailment) {
  Instance i;
  i.id = "t";
  i.premise = premise;
  i.hypothesis = hypothesis;
  i.label = label;
  return i;
}

class FixedPredictor : public HypoPredictor {
 public:
  explicit FixedPredictor(Label l) : l_(l) {}
  Label predict(std::string_view) const override { return l_; }

 private:
  Label l_;
};

}  // namespace

TEST_CASE("tokenize lowercases and strips surrounding punctuation") {
  CHECK(tokenize("A man is sleeping.") ==
        std::vector<std::string>{"a", "man", "is", "sleeping"});
  CHECK(tokenize("").empty());
  // "--" strips to nothing and is dropped
  CHECK(tokenize("Two dogs, running -- fast!") ==
        std::vector<std::string>{"two", "dogs", "running", "fast"});
  // internal punctuation retained
  CHECK(tokenize("a well-known don't") ==
        std::vector<std::string>{"a", "well-known", "don't"});
  CHECK(tokenize("  \t\n ").empty());
}

TEST_CASE("ngram_features builds unigrams and bigrams per side") {
  FeatureConfig cfg;
  auto fv = ngram_features(make("", "a man sleeps"), cfg);
  CHECK(fv.size() == 5);
  CHECK(has(fv, "a@hypothesis"));
  CHECK(has(fv, "man@hypothesis"));
  CHECK(has(fv, "sleeps@hypothesis"));
  CHECK(has(fv, "a man@hypothesis"));
  CHECK(has(fv, "man sleeps@hypothesis"));
}

TEST_CASE("ngram_features deduplicates") {
  FeatureConfig cfg;
  auto fv = ngram_features(make("", "no no"), cfg);
  CHECK(fv == FeatureVector{"no no@hypothesis", "no@hypothesis"});
}

TEST_CASE("premise and hypothesis namespaces never merge") {
  FeatureConfig cfg;
  auto fv = ngram_features(make("the dog", "the dog"), cfg);
  CHECK(has(fv, "the@hypothesis"));
  CHECK(has(fv, "the@premise"));
  CHECK(has(fv, "the dog@hypothesis"));
  CHECK(has(fv, "the dog@premise"));

  cfg.premise_ngrams = false;
  auto hyp_only = ngram_features(make("the dog", "the dog"), cfg);
  for (const auto& f : hyp_only) CHECK(!f.ends_with("@premise"));
}

TEST_CASE("length buckets") {
  FeatureConfig cfg;
  auto fv = length_features(make("one two three four", "x y z w v u t s"), cfg);
  CHECK(has(fv, "hypo-len∈[5,9)"));   // 8 tokens
  CHECK(has(fv, "len-ratio∈[1.5,∞)")); // 8/4 = 2

  fv = length_features(make("a b c d e f g h", "one two three four"), cfg);
  CHECK(has(fv, "hypo-len<5"));  // 4 tokens
  CHECK(has(fv, "len-ratio∈[0.5,0.75)"));  // 4/8

  // 6 hypothesis tokens, 12 premise tokens -> ratio 0.5
  fv = length_features(make("a b c d e f g h i j k l", "m n o p q r"), cfg);
  CHECK(has(fv, "hypo-len∈[5,9)"));
  CHECK(has(fv, "len-ratio∈[0.5,0.75)"));

  // empty premise -> overflow ratio bucket
  fv = length_features(make("", "a b c"), cfg);
  CHECK(has(fv, "len-ratio∈[1.5,∞)"));

  // very long hypothesis
  fv = length_features(
      make("p", "a b c d e f g h i j k l m n o p q r s t u v"), cfg);
  CHECK(has(fv, "hypo-len∈[20,∞)"));
}

TEST_CASE("exactly one length and one ratio feature") {
  FeatureConfig cfg;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::string prem, hyp;
    for (std::size_t w = 0; w < rng() % 25; ++w) prem += "p ";
    for (std::size_t w = 0; w < rng() % 25; ++w) hyp += "h ";
    auto fv = length_features(make(prem, hyp), cfg);
    int len_count = 0, ratio_count = 0;
    for (const auto& f : fv) {
      if (f.starts_with("hypo-len")) ++len_count;
      if (f.starts_with("len-ratio")) ++ratio_count;
    }
    CHECK(len_count == 1);
    CHECK(ratio_count == 1);
  }
}

TEST_CASE("overlap ladder is cumulative") {
  FeatureConfig cfg;
  // full overlap
  auto fv = overlap_features(make("a man runs", "a man"), cfg);
  CHECK(fv == FeatureVector{"full-lex-overlap", "lex-overlap>0.2",
                            "lex-overlap>0.4", "lex-overlap>0.6",
                            "lex-overlap>0.8", "lex-overlap>0.9"});

  // zero overlap
  CHECK(overlap_features(make("a b", "x y"), cfg).empty());

  // 3 of 4 hypothesis tokens overlap -> o = 0.75
  fv = overlap_features(make("a b c", "a b c d"), cfg);
  CHECK(fv == FeatureVector{"lex-overlap>0.2", "lex-overlap>0.4",
                            "lex-overlap>0.6"});

  // empty hypothesis: no overlap features, in particular no full-lex-overlap
  CHECK(overlap_features(make("a b", ""), cfg).empty());
}

TEST_CASE("overlap counts hypothesis token positions") {
  FeatureConfig cfg;
  // "a a b": two of three positions hit the premise set -> 2/3
  auto fv = overlap_features(make("a x y", "a a b"), cfg);
  CHECK(fv == FeatureVector{"lex-overlap>0.2", "lex-overlap>0.4",
                            "lex-overlap>0.6"});
}

TEST_CASE("overlap cumulativity property") {
  FeatureConfig cfg;
  std::mt19937_64 rng(11);
  const char* vocab[] = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string prem, hyp;
    for (std::size_t w = 0; w < 1 + rng() % 6; ++w)
      prem += std::string(vocab[rng() % 5]) + " ";
    for (std::size_t w = 0; w < 1 + rng() % 6; ++w)
      hyp += std::string(vocab[rng() % 5]) + " ";
    auto fv = overlap_features(make(prem, hyp), cfg);
    for (std::size_t i = 1; i < cfg.overlap_thresholds.size(); ++i) {
      char hi[32], lo[32];
      std::snprintf(hi, sizeof hi, "lex-overlap>%g", cfg.overlap_thresholds[i]);
      std::snprintf(lo, sizeof lo, "lex-overlap>%g", cfg.overlap_thresholds[i - 1]);
      if (has(fv, hi)) CHECK(has(fv, lo));
    }
  }
}

TEST_CASE("extract_features unions families and always adds null") {
  FeatureConfig cfg;
  auto fv = extract_features(make("a man runs", "a man"), cfg);
  CHECK(has(fv, "null"));
  CHECK(has(fv, "a man@hypothesis"));
  CHECK(has(fv, "runs@premise"));
  CHECK(has(fv, "full-lex-overlap"));
  for (const auto& f : fv) CHECK(!f.starts_with("hypo-only-pred"));

  // gated predictor feature
  cfg.use_hypo_pred = true;
  FixedPredictor pred(Label::contradiction);
  fv = extract_features(make("a man runs", "a man"), cfg, &pred);
  CHECK(has(fv, "hypo-only-pred=2"));

  CHECK_THROWS_AS(extract_features(make("p", "h"), cfg), ConfigError);
}

TEST_CASE("extract_features is pure and respects the cardinality bound") {
  FeatureConfig cfg;
  std::mt19937_64 rng(3);
  const char* vocab[] = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 100; ++trial) {
    std::string prem, hyp;
    std::size_t np = rng() % 8, nh = rng() % 8;
    for (std::size_t w = 0; w < np; ++w)
      prem += std::string(vocab[rng() % 4]) + " ";
    for (std::size_t w = 0; w < nh; ++w)
      hyp += std::string(vocab[rng() % 4]) + " ";
    auto inst = make(prem, hyp);
    auto fv1 = extract_features(inst, cfg);
    auto fv2 = extract_features(inst, cfg);
    CHECK(fv1 == fv2);
    CHECK(fv1.size() <= 2 * (np + nh) + cfg.overlap_thresholds.size() + 4);
  }
}

TEST_CASE("feature config validation") {
  FeatureConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.length_bucket_edges = {5, 5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = FeatureConfig{};
  cfg.overlap_thresholds = {0.5, 1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
