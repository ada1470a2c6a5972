#include "zdebias/ulmask.hpp"

#include <fstream>

#include <json.hpp>

#include "zdebias/error.hpp"

namespace zdebias {

namespace {

constexpr const char* kMaskFormat = "zdebias-ulmask";
constexpr int kMaskVersion = 1;

// Split an n-gram feature name ("w" or "w1 w2") into its tokens.
std::vector<std::string> ngram_tokens(std::string_view ngram) {
  std::vector<std::string> toks;
  std::size_t pos = 0;
  while (pos <= ngram.size()) {
    std::size_t sp = ngram.find(' ', pos);
    if (sp == std::string_view::npos) {
      toks.emplace_back(ngram.substr(pos));
      break;
    }
    toks.emplace_back(ngram.substr(pos, sp - pos));
    pos = sp + 1;
  }
  return toks;
}

// Zero every occurrence of the n-gram in the token sequence.
void mask_ngram(const std::vector<std::string>& tokens,
                const std::vector<std::string>& gram,
                std::vector<std::uint8_t>& mask) {
  if (gram.empty() || gram.size() > tokens.size()) return;
  for (std::size_t i = 0; i + gram.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < gram.size(); ++k)
      if (tokens[i + k] != gram[k]) { match = false; break; }
    if (match)
      for (std::size_t k = 0; k < gram.size(); ++k) mask[i + k] = 0;
  }
}

bool strip_suffix(std::string_view name, std::string_view suffix,
                  std::string_view& stem) {
  if (name.size() <= suffix.size() || !name.ends_with(suffix)) return false;
  stem = name.substr(0, name.size() - suffix.size());
  return true;
}

}  // namespace

MaskedInstance compute_mask(const Instance& inst,
                            const BiasedFeatureSets& biased,
                            const MaskConfig& cfg,
                            const HypoPredictor* predictor) {
  MaskedInstance out;
  out.id = inst.id;
  out.premise_tokens = tokenize(inst.premise);
  out.hypothesis_tokens = tokenize(inst.hypothesis);
  out.premise_mask.assign(out.premise_tokens.size(), 1);
  out.hypothesis_mask.assign(out.hypothesis_tokens.size(), 1);

  const FeatureVector fv = extract_features(inst, cfg.features, predictor);
  for (const FeatureId& f : fv)
    if (biased.contains(inst.label, f)) out.triggering_features.push_back(f);
  if (out.triggering_features.empty())
    throw ConfigError("instance \"" + inst.id +
                      "\" has no biased feature for its label; not a rejection");

  for (const FeatureId& f : out.triggering_features) {
    std::string_view stem;
    if (strip_suffix(f, "@hypothesis", stem)) {
      mask_ngram(out.hypothesis_tokens, ngram_tokens(stem), out.hypothesis_mask);
    } else if (cfg.mask_premise_ngrams && strip_suffix(f, "@premise", stem)) {
      mask_ngram(out.premise_tokens, ngram_tokens(stem), out.premise_mask);
    } else {
      // non-n-gram trigger: the whole hypothesis is relevant
      std::fill(out.hypothesis_mask.begin(), out.hypothesis_mask.end(), 0);
    }
  }
  return out;
}

void emit_mask_file(const Dataset& rejected, const BiasedFeatureSets& biased,
                    const MaskConfig& cfg, const std::filesystem::path& path,
                    const HypoPredictor* predictor) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  nlohmann::ordered_json header;
  header["format"] = kMaskFormat;
  header["version"] = kMaskVersion;
  out << header.dump() << '\n';

  std::size_t line = 1;
  for (const Instance& inst : rejected.instances) {
    ++line;
    MaskedInstance m;
    try {
      m = compute_mask(inst, biased, cfg, predictor);
    } catch (const ConfigError& e) {
      // precondition violations are reported in place, one line per record
      nlohmann::ordered_json err;
      err["id"] = inst.id;
      err["error"] = e.what();
      out << err.dump() << '\n';
      continue;
    }
    nlohmann::ordered_json rec;
    rec["id"] = m.id;
    rec["premise_tokens"] = m.premise_tokens;
    rec["hypothesis_tokens"] = m.hypothesis_tokens;
    rec["premise_mask"] = m.premise_mask;
    rec["hypothesis_mask"] = m.hypothesis_mask;
    rec["triggering_features"] = m.triggering_features;
    out << rec.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MaskedInstance> read_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing mask file header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid header: ") + e.what(), 1);
  }
  if (header.value("format", "") != kMaskFormat ||
      header.value("version", 0) != kMaskVersion)
    throw ParseError("unrecognized mask file header", 1);

  std::vector<MaskedInstance> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid record: ") + e.what(), line_no);
    }
    if (rec.contains("error")) continue;  // per-line precondition report
    MaskedInstance m;
    try {
      m.id = rec.at("id").get<std::string>();
      m.premise_tokens = rec.at("premise_tokens").get<std::vector<std::string>>();
      m.hypothesis_tokens =
          rec.at("hypothesis_tokens").get<std::vector<std::string>>();
      m.premise_mask = rec.at("premise_mask").get<std::vector<std::uint8_t>>();
      m.hypothesis_mask =
          rec.at("hypothesis_mask").get<std::vector<std::uint8_t>>();
      m.triggering_features =
          rec.at("triggering_features").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad mask record: ") + e.what(), line_no);
    }
    if (m.premise_mask.size() != m.premise_tokens.size() ||
        m.hypothesis_mask.size() != m.hypothesis_tokens.size())
      throw ParseError("mask length does not match token count", line_no);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace zdebias
