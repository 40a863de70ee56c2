#ifndef STYLOMETER_PIPELINE_HPP
#define STYLOMETER_PIPELINE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "stylometer/corpus.hpp"
#include "stylometer/detectors.hpp"
#include "stylometer/metrics.hpp"
#include "stylometer/results_store.hpp"

namespace stylometer {

struct AnalyzeOptions {
  int jobs = 1;
  // When set, a perturbation-discrepancy verdict is computed per sample
  // during analysis (the only stage that still has the raw text).
  std::optional<DetectGptConfig> detectgpt;
  // Called after each finished sample; may run on worker threads.
  std::function<void(std::size_t done, std::size_t total)> progress;
};

// One results record per sample, in input order regardless of job count.
// Per-sample failures become error records and the run continues; if every
// sample fails the run aborts with AllEndpointsFailed.
std::vector<ResultsRecord> analyze_corpus(const std::vector<TextSample>& samples,
                                          const LmScorer& scorer, const Embedder& embedder,
                                          const GrammarChecker& checker,
                                          const AnalyzeOptions& options = {});

}  // namespace stylometer

#endif  // STYLOMETER_PIPELINE_HPP
