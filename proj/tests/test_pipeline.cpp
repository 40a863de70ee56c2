#include <doctest.h>

#include "stylometer/errors.hpp"
#include "stylometer/pipeline.hpp"
#include "stylometer/version.hpp"

using namespace stylometer;

namespace {

std::vector<TextSample> small_corpus() {
  std::vector<TextSample> samples;
  const char* texts[] = {
      "The first sample has two sentences. Both are fine.",
      "Another sample goes here. It also has a second sentence with more words.",
      "A third entry rounds things out. Short and sweet.",
  };
  for (int i = 0; i < 3; ++i) {
    TextSample s;
    s.id = "s" + std::to_string(i);
    s.origin = i == 0 ? "human" : "llama";
    s.task = i == 0 ? "source" : "generation";
    s.text = texts[i];
    samples.push_back(s);
  }
  return samples;
}

}  // namespace

TEST_CASE("analyze_corpus produces one record per sample with version stamps") {
  const auto samples = small_corpus();
  const UniformScorer scorer(50);
  const HashEmbedder embedder(16);
  const RuleGrammarChecker checker;

  const auto records = analyze_corpus(samples, scorer, embedder, checker);
  REQUIRE(records.size() == samples.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].id == samples[i].id);
    CHECK(records[i].origin == samples[i].origin);
    CHECK(records[i].version == kVersion);
    CHECK(records[i].scorer == scorer.id());
    CHECK(records[i].metrics.has_value());
    CHECK_FALSE(records[i].error.has_value());
  }
}

TEST_CASE("analyze_corpus records per-sample failures and continues") {
  auto samples = small_corpus();
  TextSample empty;
  empty.id = "broken";
  empty.origin = "llada";
  empty.task = "generation";
  empty.text = "";
  samples.push_back(empty);

  const UniformScorer scorer(50);
  const HashEmbedder embedder(16);
  const RuleGrammarChecker checker;
  const auto records = analyze_corpus(samples, scorer, embedder, checker);
  REQUIRE(records.size() == 4);
  std::size_t ok = 0;
  std::size_t failed = 0;
  for (const ResultsRecord& r : records) {
    if (r.error) {
      ++failed;
      CHECK(r.id == "broken");
      CHECK(r.error->find("EmptyInput") != std::string::npos);
      CHECK_FALSE(r.metrics.has_value());
    } else {
      ++ok;
    }
  }
  CHECK(ok == 3);
  CHECK(failed == 1);
}

TEST_CASE("analyze_corpus output does not depend on the job count") {
  std::vector<TextSample> samples;
  for (int i = 0; i < 12; ++i) {
    TextSample s;
    s.id = "p" + std::to_string(i);
    s.origin = i % 2 == 0 ? "human" : "llada";
    s.task = i % 2 == 0 ? "source" : "rephrase";
    s.text = "Sample number " + std::to_string(i) +
             " has a couple of sentences. Here is the second one with index " +
             std::to_string(i) + ".";
    if (s.task == "rephrase") s.reference = "A reference text for overlap scoring.";
    samples.push_back(s);
  }
  const UniformScorer scorer(50);
  const HashEmbedder embedder(16);
  const RuleGrammarChecker checker;

  AnalyzeOptions serial;
  serial.jobs = 1;
  AnalyzeOptions parallel;
  parallel.jobs = 4;
  parallel.detectgpt = DetectGptConfig{};
  AnalyzeOptions serial_detect = serial;
  serial_detect.detectgpt = DetectGptConfig{};

  const auto a = analyze_corpus(samples, scorer, embedder, checker, serial_detect);
  const auto b = analyze_corpus(samples, scorer, embedder, checker, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  for (const ResultsRecord& r : a) {
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0].detector_name == "detectgpt");
  }
}

TEST_CASE("analyze_corpus aborts when every sample fails") {
  std::vector<TextSample> samples;
  for (int i = 0; i < 2; ++i) {
    TextSample s;
    s.id = "e" + std::to_string(i);
    s.origin = "human";
    s.task = "source";
    s.text = "";
    samples.push_back(s);
  }
  const UniformScorer scorer(50);
  const HashEmbedder embedder(16);
  const RuleGrammarChecker checker;
  CHECK_THROWS_WITH_AS(analyze_corpus(samples, scorer, embedder, checker),
                       doctest::Contains("AllEndpointsFailed"), Error);
}
