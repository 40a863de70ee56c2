#include "stylometer/pipeline.hpp"

#include <atomic>
#include <thread>

#include "stylometer/errors.hpp"
#include "stylometer/version.hpp"

namespace stylometer {

std::vector<ResultsRecord> analyze_corpus(const std::vector<TextSample>& samples,
                                          const LmScorer& scorer, const Embedder& embedder,
                                          const GrammarChecker& checker,
                                          const AnalyzeOptions& options) {
  std::vector<ResultsRecord> records(samples.size());
  if (samples.empty()) return records;

  std::optional<SynonymPerturber> perturber;
  if (options.detectgpt) perturber.emplace(options.detectgpt->replacement_fraction);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  const std::string scorer_id = scorer.id();

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      const TextSample& sample = samples[i];
      ResultsRecord record;
      record.id = sample.id;
      record.origin = sample.origin;
      record.task = sample.task;
      record.version = kVersion;
      record.scorer = scorer_id;
      try {
        record.metrics = compute_metric_vector(sample, scorer, embedder, checker);
        if (options.detectgpt) {
          record.verdicts.push_back(
              detect_gpt_score(scorer, *perturber, sample.text, *options.detectgpt));
        }
      } catch (const Error& e) {
        record.metrics.reset();
        record.verdicts.clear();
        record.error = e.what();
      } catch (const std::exception& e) {
        record.metrics.reset();
        record.verdicts.clear();
        record.error = std::string("InternalError: ") + e.what();
      }
      records[i] = std::move(record);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) options.progress(finished, samples.size());
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  bool any_ok = false;
  for (const ResultsRecord& r : records) {
    if (!r.error) {
      any_ok = true;
      break;
    }
  }
  if (!any_ok) {
    throw Error("AllEndpointsFailed", "every sample failed analysis", ErrorKind::Endpoint);
  }
  return records;
}

}  // namespace stylometer
