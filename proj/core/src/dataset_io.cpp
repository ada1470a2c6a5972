#include "zdebias/dataset_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "zdebias/error.hpp"

namespace zdebias {

using json = nlohmann::ordered_json;

std::optional<Label> parse_label(std::string_view s) {
  std::string lower(s);
  for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "entailment") return Label::entailment;
  if (lower == "neutral") return Label::neutral;
  if (lower == "contradiction") return Label::contradiction;
  return std::nullopt;
}

namespace {

std::array<double, 3> parse_probs(const json& j, std::size_t line_no) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError("model_probs must be an array of 3 numbers", line_no);
  std::array<double, 3> probs{};
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number())
      throw ParseError("model_probs entries must be numbers", line_no);
    probs[i] = j[i].get<double>();
    if (probs[i] < 0.0 || probs[i] > 1.0)
      throw ParseError("model_probs entries must be in [0,1]", line_no);
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ParseError("model_probs must sum to 1 within 1e-6", line_no);
  return probs;
}

std::string require_string(const json& rec, const char* key, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string())
    throw ParseError(std::string("missing or non-string field \"") + key + "\"", line_no);
  return it->get<std::string>();
}

}  // namespace

std::optional<Instance> parse_instance(std::string_view line, Schema schema,
                                       std::string_view dataset_name,
                                       std::size_t line_no) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!rec.is_object()) throw ParseError("record is not a JSON object", line_no);

  Instance inst;
  std::string label_str;
  if (schema == Schema::native) {
    inst.premise = require_string(rec, "premise", line_no);
    inst.hypothesis = require_string(rec, "hypothesis", line_no);
    label_str = require_string(rec, "label", line_no);
    if (auto it = rec.find("id"); it != rec.end()) {
      if (!it->is_string()) throw ParseError("id must be a string", line_no);
      inst.id = it->get<std::string>();
    }
    if (auto it = rec.find("model_probs"); it != rec.end())
      inst.model_probs = parse_probs(*it, line_no);
    if (auto it = rec.find("source"); it != rec.end()) {
      const std::string s = it->is_string() ? it->get<std::string>() : "";
      if (s == "original") inst.source = Source::original;
      else if (s == "generated") inst.source = Source::generated;
      else throw ParseError("source must be \"original\" or \"generated\"", line_no);
    }
  } else {
    inst.premise = require_string(rec, "sentence1", line_no);
    inst.hypothesis = require_string(rec, "sentence2", line_no);
    label_str = require_string(rec, "gold_label", line_no);
    if (label_str == "-") return std::nullopt;  // no gold consensus
    if (auto it = rec.find("pairID"); it != rec.end() && it->is_string())
      inst.id = it->get<std::string>();
  }

  auto label = parse_label(label_str);
  if (!label) throw ParseError("unknown label \"" + label_str + "\"", line_no);
  inst.label = *label;

  if (inst.id.empty())
    inst.id = std::string(dataset_name) + ":" + std::to_string(line_no);
  return inst;
}

ReadResult read_dataset(std::istream& in, Schema schema, std::string name) {
  ReadResult result;
  result.dataset.name = name;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto inst = parse_instance(line, schema, name, line_no);
    if (!inst) {
      ++result.skipped;
      continue;
    }
    if (!seen_ids.insert(inst->id).second)
      throw ConfigError("duplicate id \"" + inst->id + "\" at line " +
                        std::to_string(line_no));
    result.dataset.instances.push_back(std::move(*inst));
  }
  return result;
}

ReadResult read_dataset(const std::filesystem::path& path, Schema schema,
                        std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (name.empty()) name = path.stem().string();
  return read_dataset(in, schema, std::move(name));
}

std::string format_instance(const Instance& inst) {
  json rec;
  rec["id"] = inst.id;
  rec["premise"] = inst.premise;
  rec["hypothesis"] = inst.hypothesis;
  rec["label"] = std::string(label_name(inst.label));
  if (inst.model_probs)
    rec["model_probs"] = *inst.model_probs;  // shortest round-trip repr
  rec["source"] = inst.source == Source::original ? "original" : "generated";
  return rec.dump();
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const Instance& inst : dataset.instances) out << format_instance(inst) << '\n';
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset(dataset, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace zdebias
