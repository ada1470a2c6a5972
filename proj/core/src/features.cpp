#include "zdebias/features.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <unordered_set>

#include "zdebias/error.hpp"

namespace zdebias {

namespace {

// Minimal UTF-8 decoder; invalid bytes are passed through as single
// codepoints so tokenization stays total.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) { ++i; return b0; }
  int len = (b0 >= 0xF0) ? 4 : (b0 >= 0xE0) ? 3 : (b0 >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) { ++i; return b0; }
  std::uint32_t cp = b0 & (0xFF >> (len + 1));
  for (int k = 1; k < len; ++k) {
    unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) { ++i; return b0; }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) out.push_back(static_cast<char>(cp));
  else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space_cp(std::uint32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punct_cp(std::uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  // Common non-ASCII punctuation blocks.
  return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 ||
         cp == 0xB7 || cp == 0xBB || cp == 0xBF ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         cp == 0x3001 || cp == 0x3002;
}

std::uint32_t lower_cp(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

// Strip surrounding punctuation and lowercase one whitespace-delimited
// piece. Returns empty when nothing survives.
std::string clean_piece(std::string_view piece) {
  std::vector<std::uint32_t> cps;
  for (std::size_t i = 0; i < piece.size();) cps.push_back(decode_utf8(piece, i));
  std::size_t lo = 0, hi = cps.size();
  while (lo < hi && is_punct_cp(cps[lo])) ++lo;
  while (hi > lo && is_punct_cp(cps[hi - 1])) --hi;
  std::string out;
  for (std::size_t k = lo; k < hi; ++k) encode_utf8(lower_cp(cps[k]), out);
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void sort_unique(FeatureVector& fv) {
  std::sort(fv.begin(), fv.end());
  fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
}

template <typename T>
void check_ascending(const std::vector<T>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i]))
      throw ConfigError(std::string(what) + " must be strictly ascending");
}

}  // namespace

void FeatureConfig::validate() const {
  check_ascending(length_bucket_edges, "length_bucket_edges");
  check_ascending(ratio_bucket_edges, "ratio_bucket_edges");
  check_ascending(overlap_thresholds, "overlap_thresholds");
  for (double t : overlap_thresholds)
    if (t <= 0.0 || t >= 1.0)
      throw ConfigError("overlap_thresholds must lie in (0,1)");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    std::uint32_t cp = decode_utf8(text, i);
    if (is_space_cp(cp)) continue;
    // extend to the next whitespace codepoint
    std::size_t end = i;
    while (end < text.size()) {
      std::size_t probe = end;
      if (is_space_cp(decode_utf8(text, probe))) break;
      end = probe;
    }
    std::string tok = clean_piece(text.substr(start, end - start));
    if (!tok.empty()) tokens.push_back(std::move(tok));
    i = end;
  }
  return tokens;
}

namespace {

void add_ngrams(const std::vector<std::string>& toks, std::string_view suffix,
                FeatureVector& out) {
  for (const auto& t : toks) out.push_back(t + std::string(suffix));
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    out.push_back(toks[i] + " " + toks[i + 1] + std::string(suffix));
}

std::string length_bucket_name(std::size_t len, const std::vector<int>& edges) {
  if (edges.empty()) return "hypo-len∈[0,∞)";
  if (static_cast<long>(len) < edges.front())
    return "hypo-len<" + std::to_string(edges.front());
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (static_cast<long>(len) < edges[i])
      return "hypo-len∈[" + std::to_string(edges[i - 1]) + "," +
             std::to_string(edges[i]) + ")";
  return "hypo-len∈[" + std::to_string(edges.back()) + ",∞)";
}

std::string ratio_bucket_name(double ratio, bool overflow,
                              const std::vector<double>& edges) {
  if (edges.empty()) return "len-ratio∈[0,∞)";
  if (overflow || ratio >= edges.back())
    return "len-ratio∈[" + format_number(edges.back()) + ",∞)";
  if (ratio < edges.front())
    return "len-ratio∈[0," + format_number(edges.front()) + ")";
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (ratio < edges[i])
      return "len-ratio∈[" + format_number(edges[i - 1]) + "," +
             format_number(edges[i]) + ")";
  return "len-ratio∈[" + format_number(edges.back()) + ",∞)";  // unreachable
}

}  // namespace

FeatureVector ngram_features(const Instance& inst, const FeatureConfig& cfg) {
  FeatureVector fv;
  add_ngrams(tokenize(inst.hypothesis), "@hypothesis", fv);
  if (cfg.premise_ngrams) add_ngrams(tokenize(inst.premise), "@premise", fv);
  sort_unique(fv);
  return fv;
}

FeatureVector length_features(const Instance& inst, const FeatureConfig& cfg) {
  const std::size_t hyp_len = tokenize(inst.hypothesis).size();
  const std::size_t prem_len = tokenize(inst.premise).size();
  FeatureVector fv;
  fv.push_back(length_bucket_name(hyp_len, cfg.length_bucket_edges));
  const bool overflow = prem_len == 0;
  const double ratio =
      overflow ? 0.0 : static_cast<double>(hyp_len) / static_cast<double>(prem_len);
  fv.push_back(ratio_bucket_name(ratio, overflow, cfg.ratio_bucket_edges));
  sort_unique(fv);
  return fv;
}

FeatureVector overlap_features(const Instance& inst, const FeatureConfig& cfg) {
  const auto hyp = tokenize(inst.hypothesis);
  FeatureVector fv;
  if (hyp.empty()) return fv;
  const auto prem = tokenize(inst.premise);
  std::unordered_set<std::string_view> prem_set(prem.begin(), prem.end());
  std::size_t hits = 0;
  for (const auto& t : hyp)
    if (prem_set.contains(t)) ++hits;
  const double o = static_cast<double>(hits) / static_cast<double>(hyp.size());
  for (double t : cfg.overlap_thresholds)
    if (o > t) fv.push_back("lex-overlap>" + format_number(t));
  if (hits == hyp.size()) fv.push_back("full-lex-overlap");
  sort_unique(fv);
  return fv;
}

FeatureVector extract_features(const Instance& inst, const FeatureConfig& cfg,
                               const HypoPredictor* predictor) {
  if (cfg.use_hypo_pred && predictor == nullptr)
    throw ConfigError("use_hypo_pred is set but no predictor was supplied");
  FeatureVector fv = ngram_features(inst, cfg);
  for (auto& f : length_features(inst, cfg)) fv.push_back(std::move(f));
  for (auto& f : overlap_features(inst, cfg)) fv.push_back(std::move(f));
  if (cfg.use_hypo_pred)
    fv.push_back("hypo-only-pred=" +
                 std::to_string(to_index(predictor->predict(inst.hypothesis))));
  fv.push_back("null");
  sort_unique(fv);
  return fv;
}

}  // namespace zdebias
