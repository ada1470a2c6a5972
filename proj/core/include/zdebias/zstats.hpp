#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zdebias/features.hpp"
#include "zdebias/label.hpp"

namespace zdebias {

struct LabelCounts {
  std::array<std::uint64_t, 3> c{};

  std::uint64_t n() const { return c[0] + c[1] + c[2]; }
};

/// Per-feature, per-label occurrence counts: the sufficient statistic
/// for every z-score. Supports shard-and-merge (merge sums counts and
/// is associative and commutative).
class CountTable {
 public:
  /// Each feature in the vector gets +1 on the instance's label.
  void accumulate(const FeatureVector& fv, Label label);

  void merge(const CountTable& other);

  std::uint64_t total_instances() const { return total_; }
  const std::unordered_map<FeatureId, LabelCounts>& counts() const {
    return counts_;
  }

  const LabelCounts* find(const FeatureId& f) const;

 private:
  std::unordered_map<FeatureId, LabelCounts> counts_;
  std::uint64_t total_ = 0;
};

struct ZConfig {
  double p0 = 1.0 / 3.0;       // uniform-label probability
  int k = 20;                  // biased features kept per label
  std::uint64_t min_count = 1; // minimum feature support

  void validate() const;
};

/// Standardized deviation of count_l/n from p0 under the binomial
/// standard error: (count_l/n - p0) / sqrt(p0*(1-p0)/n).
/// Throws ConfigError when n == 0.
double z_score(std::uint64_t count_l, std::uint64_t n, double p0 = 1.0 / 3.0);

struct ZRow {
  FeatureId feature;
  Label label = Label::entailment;
  std::uint64_t n = 0;
  double p_hat = 0.0;
  double z = 0.0;
};

/// Top-k positive-z features per label, ranked by z descending with
/// deterministic tie-break (n descending, then name ascending).
struct BiasedFeatureSets {
  std::array<std::vector<ZRow>, 3> ranked;            // per label, rank order
  std::array<std::unordered_set<FeatureId>, 3> lookup;

  bool contains(Label l, const FeatureId& f) const {
    return lookup[to_index(l)].contains(f);
  }
  std::array<std::size_t, 3> sizes() const {
    return {ranked[0].size(), ranked[1].size(), ranked[2].size()};
  }
};

BiasedFeatureSets biased_features(const CountTable& table, const ZConfig& cfg);

/// One row per (feature, label) with n >= min_count, sorted by z
/// descending then the tie-break rule. Deterministic: identical tables
/// give bit-identical reports.
std::vector<ZRow> full_report(const CountTable& table, const ZConfig& cfg);

/// Tab-separated columns: feature, label, n, p_hat, z.
void write_report_tsv(const std::vector<ZRow>& rows, std::ostream& out);

/// Machine-readable dump for the z-vs-n plot, one JSON object per line.
void write_plot_data(const std::vector<ZRow>& rows, std::ostream& out);

}  // namespace zdebias
