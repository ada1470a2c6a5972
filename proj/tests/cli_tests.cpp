// End-to-end tests driving the installed CLI binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "zdebias_cli_tests";

int run(const std::string& cmd_args) {
  const std::string cmd = std::string(ZDEBIAS_BIN) + " " + cmd_args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

struct Fixture {
  Fixture() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);

    std::ofstream native(kWorkDir / "toy.jsonl");
    const char* hyps[] = {"a man sleeps", "a dog runs fast", "nobody is here",
                          "the man sleeps", "a bird sings", "nothing moves"};
    const char* labels[] = {"entailment", "neutral", "contradiction"};
    for (int i = 0; i < 30; ++i) {
      native << R"({"id":"t)" << i << R"(","premise":"a man in a park","hypothesis":")"
             << hyps[i % 6] << R"(","label":")" << labels[i % 3] << R"("})" << "\n";
    }
    native.close();

    std::ofstream spec(kWorkDir / "spec.json");
    spec << R"({
      "background_count": 600,
      "vocab_size": 30,
      "rng_seed": 5,
      "specs": [
        {"marker": "zmark", "placement": "hypothesis", "target_label": "contradiction",
         "occurrences": 200, "target_fraction": 0.9, "rng_seed": 11}
      ]
    })";
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "synth, analyze, filter, mask pipeline") {
  const fs::path synth_dir = kWorkDir / "synth";
  REQUIRE(run("synth --spec-file " + (kWorkDir / "spec.json").string() +
              " --out-dir " + synth_dir.string()) == 0);
  CHECK(line_count(synth_dir / "synth.jsonl") == 800);
  CHECK(fs::exists(synth_dir / "manifest.json"));

  const fs::path analyze_dir = kWorkDir / "analyze";
  REQUIRE(run("analyze --input " + (synth_dir / "synth.jsonl").string() +
              " --out-dir " + analyze_dir.string()) == 0);
  const std::string report = slurp(analyze_dir / "report.tsv");
  CHECK(report.starts_with("feature\tlabel\tn\tp_hat\tz\n"));
  // the planted marker dominates the report
  CHECK(report.find("zmark@hypothesis\tcontradiction") != std::string::npos);
  const std::string topk = slurp(analyze_dir / "topk.tsv");
  CHECK(topk.find("contradiction\t1\tzmark@hypothesis") != std::string::npos);
  CHECK(fs::exists(analyze_dir / "plot_data.jsonl"));

  const fs::path filter_dir = kWorkDir / "filter";
  REQUIRE(run("filter --input " + (synth_dir / "synth.jsonl").string() +
              " --batch-size 100 --out-dir " + filter_dir.string()) == 0);
  CHECK(line_count(filter_dir / "accepted.jsonl") +
            line_count(filter_dir / "rejected.jsonl") ==
        800);
  CHECK(line_count(filter_dir / "rejected.jsonl") > 0);
  CHECK(line_count(filter_dir / "trace.jsonl") == 8);

  const fs::path mask_dir = kWorkDir / "mask";
  REQUIRE(run("mask --input " + (filter_dir / "rejected.jsonl").string() +
              " --biased " + (filter_dir / "biased.tsv").string() +
              " --out-dir " + mask_dir.string()) == 0);
  // header + one record per rejected instance
  CHECK(line_count(mask_dir / "masks.jsonl") ==
        line_count(filter_dir / "rejected.jsonl") + 1);
}

TEST_CASE_FIXTURE(Fixture, "filter runs are byte-reproducible at any thread count") {
  const fs::path synth_dir = kWorkDir / "synth2";
  REQUIRE(run("synth --spec-file " + (kWorkDir / "spec.json").string() +
              " --out-dir " + synth_dir.string()) == 0);
  const std::string input = (synth_dir / "synth.jsonl").string();

  const fs::path a = kWorkDir / "run_a", b = kWorkDir / "run_b",
                 c = kWorkDir / "run_c";
  REQUIRE(run("filter --input " + input + " --batch-size 100 --threads 1 --out-dir " +
              a.string()) == 0);
  REQUIRE(run("filter --input " + input + " --batch-size 100 --threads 1 --out-dir " +
              b.string()) == 0);
  REQUIRE(run("filter --input " + input + " --batch-size 100 --threads 4 --out-dir " +
              c.string()) == 0);
  for (const char* f : {"accepted.jsonl", "rejected.jsonl", "biased.tsv", "trace.jsonl"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE_FIXTURE(Fixture, "train-hypo and confidence-filter") {
  const fs::path train_dir = kWorkDir / "train";
  REQUIRE(run("train-hypo --input " + (kWorkDir / "toy.jsonl").string() +
              " --out-dir " + train_dir.string()) == 0);
  REQUIRE(fs::exists(train_dir / "hypo_model.json"));

  const fs::path conf_dir = kWorkDir / "conf";
  REQUIRE(run("confidence-filter --input " + (kWorkDir / "toy.jsonl").string() +
              " --prob-source builtin --tau 0.5 --hypo-model " +
              (train_dir / "hypo_model.json").string() + " --out-dir " +
              conf_dir.string()) == 0);
  CHECK(line_count(conf_dir / "kept.jsonl") + line_count(conf_dir / "dropped.jsonl") ==
        30);

  // the model also powers the hypo-only-pred feature in analyze
  const fs::path analyze_dir = kWorkDir / "analyze_pred";
  REQUIRE(run("analyze --input " + (kWorkDir / "toy.jsonl").string() +
              " --hypo-model " + (train_dir / "hypo_model.json").string() +
              " --out-dir " + analyze_dir.string()) == 0);
  CHECK(slurp(analyze_dir / "report.tsv").find("hypo-only-pred=") !=
        std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "construct modes") {
  std::ofstream dg(kWorkDir / "dg.jsonl");
  for (int i = 0; i < 20; ++i)
    dg << R"({"id":"g)" << i
       << R"(","premise":"a cat on a mat","hypothesis":"a cat sits","label":"neutral","source":"generated"})"
       << "\n";
  dg.close();

  const fs::path plain_dir = kWorkDir / "plain";
  REQUIRE(run("construct --mode plain --seed-dataset " +
              (kWorkDir / "toy.jsonl").string() + " --input " +
              (kWorkDir / "dg.jsonl").string() + " --out-dir " +
              plain_dir.string()) == 0);
  CHECK(line_count(plain_dir / "constructed.jsonl") == 50);

  const fs::path zaug_dir = kWorkDir / "zaug";
  REQUIRE(run("construct --mode zaug --batch-size 5 --seed-dataset " +
              (kWorkDir / "toy.jsonl").string() + " --input " +
              (kWorkDir / "dg.jsonl").string() + " --out-dir " +
              zaug_dir.string()) == 0);
  // z_aug output starts with d0 verbatim
  std::istringstream merged(slurp(zaug_dir / "constructed.jsonl"));
  std::istringstream original(slurp(kWorkDir / "toy.jsonl"));
  std::string got, want;
  while (std::getline(original, want)) {
    REQUIRE(std::getline(merged, got));
    CHECK(got.find("\"id\":\"t") != std::string::npos);
  }
}

TEST_CASE_FIXTURE(Fixture, "exit codes distinguish failure classes") {
  // missing input file -> I/O error
  CHECK(run("analyze --input " + (kWorkDir / "missing.jsonl").string() +
            " --out-dir " + (kWorkDir / "x1").string()) == 4);

  // malformed record -> parse error
  std::ofstream bad(kWorkDir / "bad.jsonl");
  bad << R"({"premise":"p","hypothesis":"h","label":"maybe"})" << "\n";
  bad.close();
  CHECK(run("analyze --input " + (kWorkDir / "bad.jsonl").string() +
            " --out-dir " + (kWorkDir / "x2").string()) == 2);

  // invalid configuration -> config error
  CHECK(run("filter --input " + (kWorkDir / "toy.jsonl").string() +
            " --k 0 --out-dir " + (kWorkDir / "x3").string()) == 3);
}

TEST_CASE_FIXTURE(Fixture, "snli schema ingestion") {
  std::ofstream snli(kWorkDir / "snli.jsonl");
  snli << R"({"sentence1":"a","sentence2":"b","gold_label":"entailment","pairID":"p1"})" << "\n"
       << R"({"sentence1":"c","sentence2":"d","gold_label":"-","pairID":"p2"})" << "\n"
       << R"({"sentence1":"e","sentence2":"f","gold_label":"neutral","pairID":"p3"})" << "\n";
  snli.close();
  const fs::path out = kWorkDir / "snli_analyze";
  REQUIRE(run("analyze --input " + (kWorkDir / "snli.jsonl").string() +
              " --schema snli --out-dir " + out.string()) == 0);
  // two usable records counted under "null"
  CHECK(slurp(out / "report.tsv").find("null\t") != std::string::npos);
}
