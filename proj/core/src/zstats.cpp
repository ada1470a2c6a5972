#include "zdebias/zstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "zdebias/error.hpp"

namespace zdebias {

void CountTable::accumulate(const FeatureVector& fv, Label label) {
  const int li = to_index(label);
  for (const FeatureId& f : fv) counts_[f].c[li] += 1;
  ++total_;
}

void CountTable::merge(const CountTable& other) {
  for (const auto& [f, lc] : other.counts_) {
    auto& mine = counts_[f];
    for (int i = 0; i < 3; ++i) mine.c[i] += lc.c[i];
  }
  total_ += other.total_;
}

const LabelCounts* CountTable::find(const FeatureId& f) const {
  auto it = counts_.find(f);
  return it == counts_.end() ? nullptr : &it->second;
}

void ZConfig::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0,1)");
  if (k < 1) throw ConfigError("k must be >= 1");
}

double z_score(std::uint64_t count_l, std::uint64_t n, double p0) {
  if (n == 0) throw ConfigError("z_score: n must be >= 1");
  const double p_hat = static_cast<double>(count_l) / static_cast<double>(n);
  return (p_hat - p0) / std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
}

namespace {

// z descending, then n descending, then name ascending.
bool row_before(const ZRow& a, const ZRow& b) {
  if (a.z != b.z) return a.z > b.z;
  if (a.n != b.n) return a.n > b.n;
  return a.feature < b.feature;
}

}  // namespace

BiasedFeatureSets biased_features(const CountTable& table, const ZConfig& cfg) {
  cfg.validate();
  BiasedFeatureSets out;
  for (int li = 0; li < 3; ++li) {
    std::vector<ZRow>& rows = out.ranked[li];
    for (const auto& [f, lc] : table.counts()) {
      const std::uint64_t n = lc.n();
      if (n < cfg.min_count || n == 0) continue;
      const double z = z_score(lc.c[li], n, cfg.p0);
      if (z <= 0.0) continue;  // only over-represented features qualify
      rows.push_back({f, label_from_index(li),
                      n, static_cast<double>(lc.c[li]) / static_cast<double>(n), z});
    }
    const std::size_t k = static_cast<std::size_t>(cfg.k);
    if (rows.size() > k) {
      std::nth_element(rows.begin(), rows.begin() + k, rows.end(), row_before);
      rows.resize(k);
    }
    std::sort(rows.begin(), rows.end(), row_before);
    for (const ZRow& r : rows) out.lookup[li].insert(r.feature);
  }
  return out;
}

std::vector<ZRow> full_report(const CountTable& table, const ZConfig& cfg) {
  std::vector<ZRow> rows;
  for (const auto& [f, lc] : table.counts()) {
    const std::uint64_t n = lc.n();
    if (n < cfg.min_count || n == 0) continue;
    for (int li = 0; li < 3; ++li)
      rows.push_back({f, label_from_index(li), n,
                      static_cast<double>(lc.c[li]) / static_cast<double>(n),
                      z_score(lc.c[li], n, cfg.p0)});
  }
  std::sort(rows.begin(), rows.end(), row_before);
  return rows;
}

void write_report_tsv(const std::vector<ZRow>& rows, std::ostream& out) {
  out << "feature\tlabel\tn\tp_hat\tz\n";
  char buf[64];
  for (const ZRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g\t%.9g", r.p_hat, r.z);
    out << r.feature << '\t' << label_name(r.label) << '\t' << r.n << '\t'
        << buf << '\n';
  }
}

void write_plot_data(const std::vector<ZRow>& rows, std::ostream& out) {
  for (const ZRow& r : rows) {
    nlohmann::ordered_json j;
    j["feature"] = r.feature;
    j["label"] = std::string(label_name(r.label));
    j["n"] = r.n;
    j["p_hat"] = r.p_hat;
    j["z"] = r.z;
    out << j.dump() << '\n';
  }
}

}  // namespace zdebias
