#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zdebias/features.hpp"
#include "zdebias/instance.hpp"

namespace zdebias {

/// Multinomial bag-of-words hypothesis-only classifier with additive
/// smoothing and a shared OOV bucket. Stand-in for a neural
/// hypothesis-only model; feeds the "hypo-only-pred=<i>" feature.
class BowModel : public HypoPredictor {
 public:
  /// Throws ConfigError on an empty dataset or non-positive smoothing.
  static BowModel train(const Dataset& dataset, double smoothing = 1.0);

  /// Softmax-normalized posterior over the three labels. OOV tokens use
  /// the shared bucket; an empty hypothesis returns the priors.
  std::array<double, 3> predict_proba(std::string_view hypothesis) const;

  /// Argmax of predict_proba; ties break toward the lowest label index.
  Label argmax_label(std::string_view hypothesis) const;

  Label predict(std::string_view hypothesis) const override {
    return argmax_label(hypothesis);
  }

  double smoothing() const { return smoothing_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  /// Versioned JSON persistence; load throws ParseError on a bad file.
  void save(const std::filesystem::path& path) const;
  static BowModel load(const std::filesystem::path& path);

 private:
  BowModel() = default;

  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::string> vocab_order_;  // index -> token
  std::array<double, 3> log_priors_{};
  // Per label: vocab_size + 1 entries, last one is the OOV bucket.
  std::array<std::vector<double>, 3> log_likelihoods_;
  double smoothing_ = 1.0;
};

enum class ProbSource { instance_model_probs, builtin_bow };

struct ConfidenceConfig {
  double tau = 0.95;  // in (0,1)
  ProbSource prob_source = ProbSource::instance_model_probs;

  void validate() const;
};

/// Keep an instance iff the probability assigned to its gold label
/// strictly exceeds tau. Partition preserves input order.
/// Throws ConfigError when the configured probability source is missing.
std::pair<Dataset, Dataset> confidence_filter(const Dataset& dataset,
                                              const ConfidenceConfig& cfg,
                                              const BowModel* model = nullptr);

}  // namespace zdebias
