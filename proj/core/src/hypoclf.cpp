#include "zdebias/hypoclf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "zdebias/error.hpp"

namespace zdebias {

namespace {
constexpr const char* kModelFormat = "zdebias-bow";
constexpr int kModelVersion = 1;
}  // namespace

BowModel BowModel::train(const Dataset& dataset, double smoothing) {
  if (dataset.empty()) throw ConfigError("cannot train on an empty dataset");
  if (smoothing <= 0.0) throw ConfigError("smoothing must be positive");

  BowModel m;
  m.smoothing_ = smoothing;

  std::array<std::uint64_t, 3> label_counts{};
  std::array<std::unordered_map<std::string, std::uint64_t>, 3> token_counts;
  std::array<std::uint64_t, 3> token_totals{};

  for (const Instance& inst : dataset.instances) {
    const int li = to_index(inst.label);
    ++label_counts[li];
    for (const std::string& tok : tokenize(inst.hypothesis)) {
      ++token_counts[li][tok];
      ++token_totals[li];
      if (!m.vocab_.contains(tok)) {
        m.vocab_.emplace(tok, static_cast<std::uint32_t>(m.vocab_order_.size()));
        m.vocab_order_.push_back(tok);
      }
    }
  }

  const double n = static_cast<double>(dataset.size());
  for (int li = 0; li < 3; ++li)
    m.log_priors_[li] =
        std::log((static_cast<double>(label_counts[li]) + smoothing) /
                 (n + 3.0 * smoothing));

  const std::size_t v = m.vocab_order_.size();
  for (int li = 0; li < 3; ++li) {
    // vocab + shared OOV bucket; smoothed frequencies sum to 1 per label
    const double denom = static_cast<double>(token_totals[li]) +
                         smoothing * static_cast<double>(v + 1);
    auto& ll = m.log_likelihoods_[li];
    ll.assign(v + 1, std::log(smoothing / denom));
    for (const auto& [tok, cnt] : token_counts[li])
      ll[m.vocab_.at(tok)] =
          std::log((static_cast<double>(cnt) + smoothing) / denom);
  }
  return m;
}

std::array<double, 3> BowModel::predict_proba(std::string_view hypothesis) const {
  std::array<double, 3> logp = log_priors_;
  const std::size_t oov = vocab_order_.size();
  for (const std::string& tok : tokenize(hypothesis)) {
    auto it = vocab_.find(tok);
    const std::size_t idx = it == vocab_.end() ? oov : it->second;
    for (int li = 0; li < 3; ++li) logp[li] += log_likelihoods_[li][idx];
  }
  const double m = std::max({logp[0], logp[1], logp[2]});
  std::array<double, 3> probs{};
  double sum = 0.0;
  for (int li = 0; li < 3; ++li) sum += probs[li] = std::exp(logp[li] - m);
  for (int li = 0; li < 3; ++li) probs[li] /= sum;
  return probs;
}

Label BowModel::argmax_label(std::string_view hypothesis) const {
  const auto probs = predict_proba(hypothesis);
  int best = 0;
  for (int li = 1; li < 3; ++li)
    if (probs[li] > probs[best]) best = li;  // ties keep the lowest index
  return label_from_index(best);
}

void BowModel::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["smoothing"] = smoothing_;
  j["vocab"] = vocab_order_;
  j["log_priors"] = log_priors_;
  j["log_likelihoods"] = log_likelihoods_;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
}

BowModel BowModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid model file: ") + e.what());
  }
  if (j.value("format", "") != kModelFormat || j.value("version", 0) != kModelVersion)
    throw ParseError("unrecognized model file header");
  BowModel m;
  m.smoothing_ = j.at("smoothing").get<double>();
  m.vocab_order_ = j.at("vocab").get<std::vector<std::string>>();
  for (std::uint32_t i = 0; i < m.vocab_order_.size(); ++i)
    m.vocab_.emplace(m.vocab_order_[i], i);
  m.log_priors_ = j.at("log_priors").get<std::array<double, 3>>();
  auto ll = j.at("log_likelihoods").get<std::array<std::vector<double>, 3>>();
  for (int li = 0; li < 3; ++li) {
    if (ll[li].size() != m.vocab_order_.size() + 1)
      throw ParseError("model likelihood matrix has wrong shape");
    m.log_likelihoods_[li] = std::move(ll[li]);
  }
  return m;
}

void ConfidenceConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
}

std::pair<Dataset, Dataset> confidence_filter(const Dataset& dataset,
                                              const ConfidenceConfig& cfg,
                                              const BowModel* model) {
  cfg.validate();
  if (cfg.prob_source == ProbSource::builtin_bow && model == nullptr)
    throw ConfigError("prob_source=builtin_bow requires a trained model");

  Dataset kept{dataset.name + ".kept", {}};
  Dataset dropped{dataset.name + ".dropped", {}};
  for (const Instance& inst : dataset.instances) {
    double p_gold;
    if (cfg.prob_source == ProbSource::instance_model_probs) {
      if (!inst.model_probs)
        throw ConfigError("instance \"" + inst.id + "\" carries no model_probs");
      p_gold = (*inst.model_probs)[to_index(inst.label)];
    } else {
      p_gold = model->predict_proba(inst.hypothesis)[to_index(inst.label)];
    }
    (p_gold > cfg.tau ? kept : dropped).instances.push_back(inst);
  }
  return {std::move(kept), std::move(dropped)};
}

}  // namespace zdebias
