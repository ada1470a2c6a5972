#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "zdebias/label.hpp"

namespace zdebias {

enum class Source { original, generated };

/// One premise/hypothesis/label record. Immutable value once parsed;
/// safe to share across threads.
struct Instance {
  std::string id;
  std::string premise;
  std::string hypothesis;
  Label label = Label::entailment;
  /// Probabilities in label-index order, from an external model.
  std::optional<std::array<double, 3>> model_probs;
  Source source = Source::original;

  bool operator==(const Instance&) const = default;
};

/// Ordered sequence of instances. Order is preserved through
/// read -> process -> write; ids are unique within a dataset.
struct Dataset {
  std::string name;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  bool operator==(const Dataset&) const = default;
};

}  // namespace zdebias
