#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "zdebias/instance.hpp"

namespace zdebias {

/// A feature identifier is its name. Namespaces partition the space:
///   "<w>@hypothesis", "<w1> <w2>@hypothesis"   n-grams of the hypothesis
///   "<w>@premise",    "<w1> <w2>@premise"      n-grams of the premise
///   "hypo-len<5", "hypo-len∈[5,9)", ...        hypothesis length bucket
///   "len-ratio∈[lo,hi)"                        hypothesis/premise length ratio
///   "lex-overlap><t>", "full-lex-overlap"      lexical overlap ladder
///   "hypo-only-pred=<0|1|2>"                   hypothesis-only prediction
///   "null"                                     dummy feature on every instance
using FeatureId = std::string;

/// Deduplicated, sorted set of FeatureIds.
using FeatureVector = std::vector<FeatureId>;

struct FeatureConfig {
  std::vector<int> length_bucket_edges{5, 9, 13, 20};      // strictly ascending
  std::vector<double> ratio_bucket_edges{0.5, 0.75, 1.0, 1.5};
  std::vector<double> overlap_thresholds{0.2, 0.4, 0.6, 0.8, 0.9};  // in (0,1)
  bool use_hypo_pred = false;
  bool premise_ngrams = true;  // track "@premise" n-grams as well

  /// Throws ConfigError if edges/thresholds violate their invariants.
  void validate() const;
};

/// Supplies the "hypo-only-pred=<i>" feature. Implemented by the
/// built-in bag-of-words classifier; any label index source works.
class HypoPredictor {
 public:
  virtual ~HypoPredictor() = default;
  virtual Label predict(std::string_view hypothesis) const = 0;
};

/// Whitespace split, lowercased, surrounding punctuation stripped.
/// Pieces that strip to nothing are dropped; internal punctuation
/// (hyphens, apostrophes) is retained. Total over any UTF-8 text.
std::vector<std::string> tokenize(std::string_view text);

/// All unigrams and adjacent bigrams, suffixed "@hypothesis" /
/// "@premise". Set semantics: repeats collapse.
FeatureVector ngram_features(const Instance& inst, const FeatureConfig& cfg);

/// Exactly one hypothesis-length bucket and one length-ratio bucket.
/// Empty premise lands the ratio in the overflow bucket.
FeatureVector length_features(const Instance& inst, const FeatureConfig& cfg);

/// Cumulative "lex-overlap>t" ladder plus "full-lex-overlap" at o == 1.
FeatureVector overlap_features(const Instance& inst, const FeatureConfig& cfg);

/// Union of the families above plus "null" and, when configured,
/// "hypo-only-pred=<i>". Pure: same inputs give the same vector.
/// Throws ConfigError if use_hypo_pred is set without a predictor.
FeatureVector extract_features(const Instance& inst, const FeatureConfig& cfg,
                               const HypoPredictor* predictor = nullptr);

}  // namespace zdebias
