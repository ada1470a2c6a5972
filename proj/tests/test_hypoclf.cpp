#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "zdebias/error.hpp"
#include "zdebias/hypoclf.hpp"

using namespace zdebias;

namespace {

Instance make(const std::string& hyp, Label label, const std::string& id) {
  Instance i;
  i.id = id;
  i.premise = "some premise";
  i.hypothesis = hyp;
  i.label = label;
  return i;
}

// Two instances per class, each class with a distinct marker token.
Dataset tiny_corpus() {
  Dataset d{"tiny", {}};
  d.instances.push_back(make("cat purrs", Label::entailment, "t0"));
  d.instances.push_back(make("cat naps", Label::entailment, "t1"));
  d.instances.push_back(make("dog barks", Label::neutral, "t2"));
  d.instances.push_back(make("dog digs", Label::neutral, "t3"));
  d.instances.push_back(make("bird sings", Label::contradiction, "t4"));
  d.instances.push_back(make("bird flies", Label::contradiction, "t5"));
  return d;
}

}  // namespace

TEST_CASE("train rejects degenerate input") {
  CHECK_THROWS_AS(BowModel::train(Dataset{}), ConfigError);
  CHECK_THROWS_AS(BowModel::train(tiny_corpus(), 0.0), ConfigError);
}

TEST_CASE("class-marker tokens dominate their label") {
  auto model = BowModel::train(tiny_corpus());
  // the tiny corpus is perfectly separable by its marker tokens
  for (const auto& inst : tiny_corpus().instances)
    CHECK(model.argmax_label(inst.hypothesis) == inst.label);
  CHECK(model.argmax_label("cat") == Label::entailment);
  CHECK(model.argmax_label("dog") == Label::neutral);
  CHECK(model.argmax_label("bird") == Label::contradiction);
}

TEST_CASE("empty hypothesis returns the priors") {
  auto model = BowModel::train(tiny_corpus());
  auto probs = model.predict_proba("");
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  // balanced corpus + tie -> lowest label index
  CHECK(model.argmax_label("") == Label::entailment);
}

TEST_CASE("predict_proba always yields a valid distribution") {
  auto model = BowModel::train(tiny_corpus());
  for (const char* hyp :
       {"", "cat", "never seen tokens here", "cat dog bird", "cat cat cat dog"}) {
    auto probs = model.predict_proba(hyp);
    double sum = 0.0;
    for (double p : probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("marker-encoded corpus trains to high accuracy") {
  std::mt19937_64 rng(17);
  const char* markers[] = {"alpha", "beta", "gamma"};
  const char* filler[] = {"the", "a", "thing", "happens", "today"};
  Dataset d{"markers", {}};
  for (int i = 0; i < 300; ++i) {
    const int li = static_cast<int>(rng() % 3);
    std::string hyp = markers[li];
    for (int w = 0; w < 3; ++w) hyp += std::string(" ") + filler[rng() % 5];
    d.instances.push_back(make(hyp, label_from_index(li), "m" + std::to_string(i)));
  }
  auto model = BowModel::train(d);
  int correct = 0;
  for (const auto& inst : d.instances)
    if (model.argmax_label(inst.hypothesis) == inst.label) ++correct;
  CHECK(static_cast<double>(correct) / d.size() >= 0.95);
}

TEST_CASE("save/load round-trip preserves predictions") {
  auto model = BowModel::train(tiny_corpus());
  auto path = std::filesystem::temp_directory_path() / "zdebias_bow_test.json";
  model.save(path);
  auto loaded = BowModel::load(path);
  for (const char* hyp : {"cat purrs", "dog", "unknown words", ""}) {
    auto a = model.predict_proba(hyp);
    auto b = loaded.predict_proba(hyp);
    for (int li = 0; li < 3; ++li) CHECK(a[li] == doctest::Approx(b[li]).epsilon(1e-12));
  }
  std::filesystem::remove(path);
}

TEST_CASE("confidence filter keeps strict exceedance only") {
  Dataset d{"conf", {}};
  auto add = [&](std::array<double, 3> probs, Label label, const char* id) {
    Instance i = make("h", label, id);
    i.model_probs = probs;
    d.instances.push_back(std::move(i));
  };
  add({0.97, 0.02, 0.01}, Label::entailment, "keep");
  add({0.95, 0.03, 0.02}, Label::entailment, "boundary");  // == tau: dropped
  add({0.01, 0.01, 0.98}, Label::contradiction, "keep2");
  add({0.98, 0.01, 0.01}, Label::neutral, "wrong-label");

  ConfidenceConfig cfg;  // tau = 0.95, instance_model_probs
  auto [kept, dropped] = confidence_filter(d, cfg);
  CHECK(kept.size() == 2);
  CHECK(kept.instances[0].id == "keep");
  CHECK(kept.instances[1].id == "keep2");
  CHECK(dropped.size() == 2);

  // idempotence: kept is a fixed point
  auto [kept2, dropped2] = confidence_filter(kept, cfg);
  CHECK(kept2.instances == kept.instances);
  CHECK(dropped2.empty());
}

TEST_CASE("tau near zero keeps everything with positive gold probability") {
  Dataset d{"conf", {}};
  Instance i = make("h", Label::neutral, "x");
  i.model_probs = {{0.3, 0.4, 0.3}};
  d.instances.push_back(i);
  ConfidenceConfig cfg;
  cfg.tau = 1e-9;
  auto [kept, dropped] = confidence_filter(d, cfg);
  CHECK(kept.size() == 1);
}

TEST_CASE("confidence filter with the builtin model") {
  auto corpus = tiny_corpus();
  auto model = BowModel::train(corpus);
  ConfidenceConfig cfg;
  cfg.prob_source = ProbSource::builtin_bow;
  cfg.tau = 0.5;
  auto [kept, dropped] = confidence_filter(corpus, cfg, &model);
  CHECK(kept.size() + dropped.size() == corpus.size());
  for (const auto& inst : kept.instances)
    CHECK(model.predict_proba(inst.hypothesis)[to_index(inst.label)] > 0.5);

  CHECK_THROWS_AS(confidence_filter(corpus, cfg, nullptr), ConfigError);
}

TEST_CASE("missing probability source is an error") {
  Dataset d{"conf", {make("h", Label::neutral, "x")}};  // no model_probs
  CHECK_THROWS_AS(confidence_filter(d, ConfidenceConfig{}), ConfigError);
}

TEST_CASE("confidence config validation") {
  ConfidenceConfig cfg;
  cfg.tau = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
