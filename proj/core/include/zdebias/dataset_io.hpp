#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "zdebias/instance.hpp"

namespace zdebias {

enum class Schema { native, snli };

/// Parse one line-delimited record.
///
/// Native schema: {"premise", "hypothesis", "label"[, "id",
/// "model_probs", "source"]}. SNLI schema: {"sentence1", "sentence2",
/// "gold_label"[, "pairID"]}.
///
/// SNLI records with gold_label "-" (no annotator consensus) yield
/// nullopt rather than an error. A missing id is synthesized as
/// "<dataset_name>:<line_no>".
///
/// Throws ParseError (carrying line_no) on malformed structure,
/// unknown label strings, or invalid model_probs.
std::optional<Instance> parse_instance(std::string_view line, Schema schema,
                                       std::string_view dataset_name,
                                       std::size_t line_no);

struct ReadResult {
  Dataset dataset;
  std::size_t skipped = 0;  // records dropped by the skip rule
};

/// Read a line-delimited dataset in file order. Blank lines are ignored.
/// Throws IoError if the file cannot be opened, ParseError on the first
/// malformed record, ConfigError on duplicate ids.
ReadResult read_dataset(const std::filesystem::path& path, Schema schema,
                        std::string name = "");

ReadResult read_dataset(std::istream& in, Schema schema, std::string name);

/// Serialize one instance in the native schema with fixed field order
/// (id, premise, hypothesis, label, model_probs?, source).
std::string format_instance(const Instance& inst);

/// Write in the native schema, one record per line.
/// read_dataset(write_dataset(d)) == d.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

void write_dataset(const Dataset& dataset, std::ostream& out);

}  // namespace zdebias
