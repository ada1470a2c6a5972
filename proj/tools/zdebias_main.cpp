// Command-line front-end: analyze, filter, construct, train-hypo,
// confidence-filter, mask, synth. Every command writes a run manifest
// with the fully resolved configuration and input digests, so a run can
// be reproduced byte-for-byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zdebias/dataset_io.hpp"
#include "zdebias/error.hpp"
#include "zdebias/hypoclf.hpp"
#include "zdebias/synth.hpp"
#include "zdebias/ulmask.hpp"
#include "zdebias/zfilter.hpp"
#include "zdebias/zstats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace zdebias;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 2 parse error, 3 config error, 4 I/O error.
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

struct ToolConfig {
  FeatureConfig features;
  ZConfig z;
  std::size_t batch_size = 10000;
  bool freeze_seed_bias = false;
  ConfidenceConfig confidence;
  double smoothing = 1.0;
  bool mask_premise_ngrams = true;
  int threads = 1;
};

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void load_config_file(const fs::path& path, ToolConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file: " + std::string(e.what()));
  }
  if (auto it = j.find("features"); it != j.end()) {
    maybe(*it, "length_bucket_edges", cfg.features.length_bucket_edges);
    maybe(*it, "ratio_bucket_edges", cfg.features.ratio_bucket_edges);
    maybe(*it, "overlap_thresholds", cfg.features.overlap_thresholds);
    maybe(*it, "use_hypo_pred", cfg.features.use_hypo_pred);
    maybe(*it, "premise_ngrams", cfg.features.premise_ngrams);
  }
  if (auto it = j.find("z"); it != j.end()) {
    maybe(*it, "p0", cfg.z.p0);
    maybe(*it, "k", cfg.z.k);
    maybe(*it, "min_count", cfg.z.min_count);
  }
  if (auto it = j.find("filter"); it != j.end()) {
    maybe(*it, "batch_size", cfg.batch_size);
    maybe(*it, "freeze_seed_bias", cfg.freeze_seed_bias);
  }
  if (auto it = j.find("confidence"); it != j.end()) {
    maybe(*it, "tau", cfg.confidence.tau);
    std::string src;
    maybe(*it, "prob_source", src);
    if (src == "builtin") cfg.confidence.prob_source = ProbSource::builtin_bow;
    else if (src == "instance" || src.empty())
      cfg.confidence.prob_source = ProbSource::instance_model_probs;
    else throw ConfigError("unknown prob_source \"" + src + "\"");
  }
  maybe(j, "smoothing", cfg.smoothing);
  maybe(j, "mask_premise_ngrams", cfg.mask_premise_ngrams);
  maybe(j, "threads", cfg.threads);
}

json config_to_json(const ToolConfig& cfg) {
  json j;
  j["features"] = {{"length_bucket_edges", cfg.features.length_bucket_edges},
                   {"ratio_bucket_edges", cfg.features.ratio_bucket_edges},
                   {"overlap_thresholds", cfg.features.overlap_thresholds},
                   {"use_hypo_pred", cfg.features.use_hypo_pred},
                   {"premise_ngrams", cfg.features.premise_ngrams}};
  j["z"] = {{"p0", cfg.z.p0}, {"k", cfg.z.k}, {"min_count", cfg.z.min_count}};
  j["filter"] = {{"batch_size", cfg.batch_size},
                 {"freeze_seed_bias", cfg.freeze_seed_bias}};
  j["confidence"] = {
      {"tau", cfg.confidence.tau},
      {"prob_source", cfg.confidence.prob_source == ProbSource::builtin_bow
                          ? "builtin"
                          : "instance"}};
  j["smoothing"] = cfg.smoothing;
  j["mask_premise_ngrams"] = cfg.mask_premise_ngrams;
  j["threads"] = cfg.threads;
  return j;
}

std::string fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[32];
  std::snprintf(hex, sizeof hex, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

struct CommonArgs {
  std::string input;
  std::string seed_dataset;
  std::string schema = "native";
  std::string config_file;
  std::string out_dir;
  std::string hypo_model;
};

Schema parse_schema(const std::string& s) {
  if (s == "native") return Schema::native;
  if (s == "snli") return Schema::snli;
  throw ConfigError("unknown schema \"" + s + "\"");
}

ReadResult read_input(const std::string& path, const std::string& schema) {
  auto result = read_dataset(fs::path(path), parse_schema(schema));
  if (result.skipped > 0)
    std::cerr << "skipped: " << result.skipped << " record(s) in " << path
              << "\n";
  return result;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ToolConfig& cfg,
                    const std::vector<std::string>& inputs,
                    const json& extra = json::object()) {
  json m;
  m["tool"] = "zdebias";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  json digests = json::object();
  for (const auto& p : inputs) digests[p] = fnv1a64_file(p);
  m["inputs"] = digests;
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest");
  out << m.dump(2) << '\n';
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
}

std::optional<BowModel> maybe_load_model(const std::string& path,
                                         ToolConfig& cfg) {
  if (path.empty()) return std::nullopt;
  auto model = BowModel::load(path);
  cfg.features.use_hypo_pred = true;
  return model;
}

void write_topk_tsv(const CountTable& table, const ZConfig& zcfg,
                    std::ostream& out) {
  auto biased = biased_features(table, zcfg);
  out << "label\trank\tfeature\tn\tp_hat\tz\n";
  char buf[64];
  for (int li = 0; li < 3; ++li) {
    int rank = 1;
    for (const auto& r : biased.ranked[li]) {
      std::snprintf(buf, sizeof buf, "%.9g\t%.9g", r.p_hat, r.z);
      out << label_name(label_from_index(li)) << '\t' << rank++ << '\t'
          << r.feature << '\t' << r.n << '\t' << buf << '\n';
    }
  }
}

void write_biased_tsv(const BiasedFeatureSets& biased, std::ostream& out) {
  out << "feature\tlabel\tn\tp_hat\tz\n";
  char buf[64];
  for (int li = 0; li < 3; ++li)
    for (const auto& r : biased.ranked[li]) {
      std::snprintf(buf, sizeof buf, "%.9g\t%.9g", r.p_hat, r.z);
      out << r.feature << '\t' << label_name(label_from_index(li)) << '\t'
          << r.n << '\t' << buf << '\n';
    }
}

BiasedFeatureSets read_biased_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  BiasedFeatureSets biased;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;  // header
    std::istringstream ss(line);
    ZRow row;
    std::string label_str, n_str, p_str, z_str;
    if (!std::getline(ss, row.feature, '\t') ||
        !std::getline(ss, label_str, '\t') || !std::getline(ss, n_str, '\t') ||
        !std::getline(ss, p_str, '\t') || !std::getline(ss, z_str))
      throw ParseError("malformed biased-feature row", line_no);
    auto label = parse_label(label_str);
    if (!label) throw ParseError("unknown label \"" + label_str + "\"", line_no);
    row.label = *label;
    row.n = std::stoull(n_str);
    row.p_hat = std::stod(p_str);
    row.z = std::stod(z_str);
    biased.lookup[to_index(row.label)].insert(row.feature);
    biased.ranked[to_index(row.label)].push_back(std::move(row));
  }
  return biased;
}

void write_trace(const std::vector<BatchTrace>& trace, std::ostream& out) {
  for (const auto& t : trace) {
    json j;
    j["batch"] = t.batch_index;
    j["accepted"] = t.accepted;
    j["rejected"] = t.rejected;
    j["biased_sizes"] = t.biased_sizes;
    out << j.dump() << '\n';
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

// -------------------------------------------------------------------------

int cmd_analyze(const CommonArgs& args, ToolConfig cfg, bool dump_features) {
  ensure_out_dir(args.out_dir);
  auto model = maybe_load_model(args.hypo_model, cfg);
  const HypoPredictor* pred = model ? &*model : nullptr;
  auto input = read_input(args.input, args.schema);
  cfg.features.validate();
  cfg.z.validate();

  CountTable table;
  std::ofstream feat_out;
  if (dump_features) feat_out = open_out(fs::path(args.out_dir) / "features.jsonl");
  for (const auto& inst : input.dataset.instances) {
    auto fv = extract_features(inst, cfg.features, pred);
    if (dump_features) {
      json j;
      j["id"] = inst.id;
      j["features"] = fv;
      feat_out << j.dump() << '\n';
    }
    table.accumulate(fv, inst.label);
  }

  auto rows = full_report(table, cfg.z);
  auto report = open_out(fs::path(args.out_dir) / "report.tsv");
  write_report_tsv(rows, report);
  auto topk = open_out(fs::path(args.out_dir) / "topk.tsv");
  write_topk_tsv(table, cfg.z, topk);
  auto plot = open_out(fs::path(args.out_dir) / "plot_data.jsonl");
  write_plot_data(rows, plot);

  std::vector<std::string> inputs{args.input};
  if (!args.hypo_model.empty()) inputs.push_back(args.hypo_model);
  write_manifest(args.out_dir, "analyze", cfg, inputs,
                 {{"skipped", input.skipped}});
  return 0;
}

int cmd_filter(const CommonArgs& args, ToolConfig cfg) {
  ensure_out_dir(args.out_dir);
  auto model = maybe_load_model(args.hypo_model, cfg);
  const HypoPredictor* pred = model ? &*model : nullptr;
  auto input = read_input(args.input, args.schema);

  FilterConfig fcfg;
  fcfg.z = cfg.z;
  fcfg.features = cfg.features;
  fcfg.batch_size = cfg.batch_size;
  fcfg.freeze_seed_bias = cfg.freeze_seed_bias;
  fcfg.threads = cfg.threads;

  std::optional<ReadResult> seed;
  if (!args.seed_dataset.empty()) seed = read_input(args.seed_dataset, args.schema);

  auto outcome = z_filter(input.dataset, seed ? &seed->dataset : nullptr, fcfg, pred);

  write_dataset(outcome.accepted, fs::path(args.out_dir) / "accepted.jsonl");
  write_dataset(outcome.rejected, fs::path(args.out_dir) / "rejected.jsonl");
  auto biased = open_out(fs::path(args.out_dir) / "biased.tsv");
  write_biased_tsv(outcome.final_biased, biased);
  auto trace = open_out(fs::path(args.out_dir) / "trace.jsonl");
  write_trace(outcome.trace, trace);

  std::vector<std::string> inputs{args.input};
  if (!args.seed_dataset.empty()) inputs.push_back(args.seed_dataset);
  if (!args.hypo_model.empty()) inputs.push_back(args.hypo_model);
  write_manifest(args.out_dir, "filter", cfg, inputs,
                 {{"accepted", outcome.accepted.size()},
                  {"rejected", outcome.rejected.size()}});
  return 0;
}

int cmd_construct(const CommonArgs& args, ToolConfig cfg,
                  const std::string& mode_str) {
  ensure_out_dir(args.out_dir);
  auto model = maybe_load_model(args.hypo_model, cfg);
  const HypoPredictor* pred = model ? &*model : nullptr;

  ConstructMode mode;
  if (mode_str == "zaug") mode = ConstructMode::z_aug;
  else if (mode_str == "parz") mode = ConstructMode::par_z;
  else if (mode_str == "seqz") mode = ConstructMode::seq_z;
  else if (mode_str == "plain") mode = ConstructMode::merge_plain;
  else throw ConfigError("unknown mode \"" + mode_str + "\"");

  auto d0 = read_input(args.seed_dataset, args.schema);
  auto dg = read_input(args.input, args.schema);

  FilterConfig fcfg;
  fcfg.z = cfg.z;
  fcfg.features = cfg.features;
  fcfg.batch_size = cfg.batch_size;
  fcfg.threads = cfg.threads;

  auto result = construct(mode, d0.dataset, dg.dataset, fcfg, pred);
  write_dataset(result, fs::path(args.out_dir) / "constructed.jsonl");

  std::vector<std::string> inputs{args.seed_dataset, args.input};
  if (!args.hypo_model.empty()) inputs.push_back(args.hypo_model);
  write_manifest(args.out_dir, "construct", cfg, inputs,
                 {{"mode", mode_str}, {"size", result.size()}});
  return 0;
}

int cmd_train_hypo(const CommonArgs& args, ToolConfig cfg) {
  ensure_out_dir(args.out_dir);
  auto input = read_input(args.input, args.schema);
  auto model = BowModel::train(input.dataset, cfg.smoothing);
  model.save(fs::path(args.out_dir) / "hypo_model.json");
  write_manifest(args.out_dir, "train-hypo", cfg, {args.input},
                 {{"vocab_size", model.vocab_size()}});
  return 0;
}

int cmd_confidence_filter(const CommonArgs& args, ToolConfig cfg) {
  ensure_out_dir(args.out_dir);
  std::optional<BowModel> model;
  if (!args.hypo_model.empty()) model = BowModel::load(args.hypo_model);
  if (cfg.confidence.prob_source == ProbSource::builtin_bow && !model)
    throw ConfigError("prob-source builtin requires --hypo-model");
  auto input = read_input(args.input, args.schema);

  auto [kept, dropped] =
      confidence_filter(input.dataset, cfg.confidence, model ? &*model : nullptr);
  write_dataset(kept, fs::path(args.out_dir) / "kept.jsonl");
  write_dataset(dropped, fs::path(args.out_dir) / "dropped.jsonl");

  std::vector<std::string> inputs{args.input};
  if (!args.hypo_model.empty()) inputs.push_back(args.hypo_model);
  write_manifest(args.out_dir, "confidence-filter", cfg, inputs,
                 {{"kept", kept.size()}, {"dropped", dropped.size()}});
  return 0;
}

int cmd_mask(const CommonArgs& args, ToolConfig cfg, const std::string& biased_path) {
  ensure_out_dir(args.out_dir);
  auto model = maybe_load_model(args.hypo_model, cfg);
  const HypoPredictor* pred = model ? &*model : nullptr;
  auto rejected = read_input(args.input, args.schema);
  auto biased = read_biased_tsv(biased_path);

  MaskConfig mcfg;
  mcfg.features = cfg.features;
  mcfg.mask_premise_ngrams = cfg.mask_premise_ngrams;
  emit_mask_file(rejected.dataset, biased, mcfg,
                 fs::path(args.out_dir) / "masks.jsonl", pred);

  std::vector<std::string> inputs{args.input, biased_path};
  if (!args.hypo_model.empty()) inputs.push_back(args.hypo_model);
  write_manifest(args.out_dir, "mask", cfg, inputs,
                 {{"masked", rejected.dataset.size()}});
  return 0;
}

int cmd_synth(const CommonArgs& args, ToolConfig cfg,
              const std::string& spec_path) {
  ensure_out_dir(args.out_dir);
  std::ifstream in(spec_path);
  if (!in) throw IoError("cannot open " + spec_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("spec file: " + std::string(e.what()));
  }

  std::vector<BiasSpec> specs;
  for (const auto& s : j.value("specs", json::array())) {
    BiasSpec spec;
    spec.marker = s.at("marker").get<std::string>();
    const std::string placement = s.value("placement", "hypothesis");
    if (placement == "hypothesis") spec.placement = Placement::hypothesis;
    else if (placement == "premise") spec.placement = Placement::premise;
    else throw ConfigError("unknown placement \"" + placement + "\"");
    auto label = parse_label(s.at("target_label").get<std::string>());
    if (!label) throw ConfigError("unknown target_label in spec");
    spec.target_label = *label;
    spec.occurrences = s.at("occurrences").get<std::uint32_t>();
    spec.target_fraction = s.at("target_fraction").get<double>();
    spec.rng_seed = s.value("rng_seed", 0ull);
    specs.push_back(std::move(spec));
  }
  const auto background = j.value("background_count", 0ull);
  const auto vocab = j.value("vocab_size", 100ull);
  const auto seed = j.value("rng_seed", 0ull);

  auto dataset = generate(specs, background, vocab, seed);
  write_dataset(dataset, fs::path(args.out_dir) / "synth.jsonl");
  write_manifest(args.out_dir, "synth", cfg, {spec_path},
                 {{"size", dataset.size()}, {"rng_seed", seed}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset bias measurement and z-filtering toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  ToolConfig cfg;

  // Resolve the config file before the flag pass so flags override it.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string_view(argv[i]) == "--config") args.config_file = argv[i + 1];
  try {
    if (!args.config_file.empty()) load_config_file(args.config_file, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }

  auto add_common = [&](CLI::App* sub, bool needs_input = true) {
    auto* opt = sub->add_option("--input", args.input, "input dataset (JSONL)");
    if (needs_input) opt->required();
    sub->add_option("--schema", args.schema, "input schema: native|snli");
    sub->add_option("--config", args.config_file, "JSON config file");
    sub->add_option("--out-dir", args.out_dir, "output directory")->required();
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--hypo-model", args.hypo_model,
                    "trained hypothesis-only model (enables hypo-only-pred)");
  };
  auto add_zflags = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.z.k, "biased features per label");
    sub->add_option("--min-count", cfg.z.min_count, "minimum feature support");
  };

  bool dump_features = false;
  auto* analyze = app.add_subcommand("analyze", "z-statistics report");
  add_common(analyze);
  add_zflags(analyze);
  analyze->add_flag("--dump-features", dump_features,
                    "also dump per-instance feature vectors");

  auto* filter = app.add_subcommand("filter", "iterative z-filtering");
  add_common(filter);
  add_zflags(filter);
  filter->add_option("--seed-dataset", args.seed_dataset,
                     "seed dataset for conditional filtering");
  filter->add_option("--batch-size", cfg.batch_size, "filter batch size");
  filter->add_flag("--freeze-seed-bias", cfg.freeze_seed_bias,
                   "keep biased sets frozen at the seed snapshot");

  std::string mode_str;
  auto* construct_cmd = app.add_subcommand("construct", "combine two datasets");
  add_common(construct_cmd);
  add_zflags(construct_cmd);
  construct_cmd
      ->add_option("--mode", mode_str, "zaug|parz|seqz|plain")
      ->required();
  construct_cmd
      ->add_option("--seed-dataset", args.seed_dataset, "original dataset d0")
      ->required();
  construct_cmd->add_option("--batch-size", cfg.batch_size, "filter batch size");

  auto* train = app.add_subcommand("train-hypo", "train the bag-of-words model");
  add_common(train);
  train->add_option("--smoothing", cfg.smoothing, "additive smoothing");

  std::string prob_source;
  auto* conf = app.add_subcommand("confidence-filter",
                                  "drop low-confidence instances");
  add_common(conf);
  conf->add_option("--tau", cfg.confidence.tau, "confidence threshold");
  conf->add_option("--prob-source", prob_source, "instance|builtin");

  std::string biased_path;
  auto* mask = app.add_subcommand("mask", "unlikelihood token masks");
  add_common(mask);
  mask->add_option("--biased", biased_path, "biased.tsv from a filter run")
      ->required();

  std::string spec_path;
  auto* synth = app.add_subcommand("synth", "synthetic planted-bias corpus");
  add_common(synth, /*needs_input=*/false);
  synth->add_option("--spec-file", spec_path, "generation spec (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!prob_source.empty()) {
      if (prob_source == "builtin")
        cfg.confidence.prob_source = ProbSource::builtin_bow;
      else if (prob_source == "instance")
        cfg.confidence.prob_source = ProbSource::instance_model_probs;
      else
        throw ConfigError("unknown prob-source \"" + prob_source + "\"");
    }
    if (analyze->parsed()) return cmd_analyze(args, cfg, dump_features);
    if (filter->parsed()) return cmd_filter(args, cfg);
    if (construct_cmd->parsed()) return cmd_construct(args, cfg, mode_str);
    if (train->parsed()) return cmd_train_hypo(args, cfg);
    if (conf->parsed()) return cmd_confidence_filter(args, cfg);
    if (mask->parsed()) return cmd_mask(args, cfg, biased_path);
    if (synth->parsed()) return cmd_synth(args, cfg, spec_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
