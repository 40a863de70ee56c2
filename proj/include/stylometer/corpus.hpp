#ifndef STYLOMETER_CORPUS_HPP
#define STYLOMETER_CORPUS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stylometer {

// One corpus item. origin is "human" for source abstracts or a model label
// ("llama", "llada", ...); task is "source", "rephrase" or "generation".
// Rephrase samples carry the original abstract as reference.
struct TextSample {
  std::string id;
  std::string origin;
  std::string task;
  std::string text;
  std::optional<std::string> reference;
  std::optional<std::string> title;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  bool operator==(const TextSample& other) const = default;
};

struct IngestResult {
  std::vector<TextSample> samples;
  std::size_t skipped_rows = 0;
  std::vector<std::string> warnings;
};

// Decoding configuration echoed verbatim into every generated sample's meta.
// Fields specific to one decoder family (diffusion steps, block length, ...)
// ride in `extra` and are passed through to the endpoint untouched.
struct GenerationConfig {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_new_tokens = 128;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
  static GenerationConfig from_json(const nlohmann::ordered_json& j);
};

struct GenerateOptions {
  int attempts = 3;
  int backoff_ms = 250;          // doubled after each failed attempt
  std::string model_name;       // optional "model" field in the request body
};

struct GenerationResult {
  std::string text;
  int attempts_used = 1;
  double latency_ms = 0.0;  // logged by callers, never persisted
};

// FNV-1a 64-bit over title + abstract, printed as 16 hex digits. Stable ids
// keep joins between samples and results valid across re-ingestion.
std::string content_hash(std::string_view title, std::string_view abstract);

// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

// Reads a CSV with header columns `titles`, `summaries`, `terms` (RFC-4180
// quoting, embedded commas/newlines allowed). Each well-formed row becomes a
// human/source sample; malformed rows are skipped with a warning and tallied.
// Throws MissingColumn when a required header is absent.
IngestResult ingest_csv(const std::string& path);

// Seeded uniform sample without replacement (partial Fisher-Yates over the
// input order, mt19937, j = i + rng() % (N - i)), then sorted by id.
std::vector<TextSample> sample_corpus(const std::vector<TextSample>& samples, std::size_t n,
                                      std::uint64_t seed);

// Exact prompt templates; byte-for-byte stable.
std::string build_prompt(const TextSample& sample, std::string_view task);

// Calls an OpenAI-compatible chat-completions endpoint (POST
// /v1/chat/completions, single user message). Retries with exponential
// backoff on connect failures and 5xx responses.
GenerationResult generate(const std::string& endpoint, const std::string& prompt,
                          const GenerationConfig& config, const GenerateOptions& options = {});

struct GenerateCorpusOptions {
  std::vector<std::string> tasks = {"rephrase", "generation"};
  GenerationConfig base_config;
  // Per-model decoder fields merged into base_config.extra (e.g. diffusion
  // steps for one endpoint only).
  std::map<std::string, nlohmann::ordered_json> extra_by_model;
  int attempts = 3;
  int backoff_ms = 250;
  // Concurrent endpoint calls; output order stays deterministic.
  int jobs = 1;
  // Called after each completion; latency goes to logs, never into samples.
  std::function<void(std::size_t done, std::size_t total, const std::string& label,
                     const std::string& task, double latency_ms)>
      progress;
};

// Runs every (source, task, model) combination against the endpoints and
// returns sources + generated samples, so the output corpus always satisfies
// |generated| = |sources| * |tasks| * |models|. Any endpoint failure aborts
// the run (partial corpora would silently break that bookkeeping).
// Generated ids hash (source id, model label, task) with the new text;
// sample meta echoes the full decoding config verbatim.
std::vector<TextSample> generate_corpus(const std::vector<TextSample>& sources,
                                        const std::map<std::string, std::string>& model_urls,
                                        const GenerateCorpusOptions& options = {});

// Line-delimited JSON, one sample per line, keys in fixed order, UTF-8.
// load(save(x)) == x field-for-field.
void save_samples(const std::vector<TextSample>& samples, const std::string& path);
std::vector<TextSample> load_samples(const std::string& path);

nlohmann::ordered_json sample_to_json(const TextSample& sample);
TextSample sample_from_json(const nlohmann::ordered_json& j);

}  // namespace stylometer

#endif  // STYLOMETER_CORPUS_HPP
