#include "stylometer/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <unordered_set>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Minimal RFC-4180 parser: quoted fields may contain commas, newlines and
// doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
        break;
      case '\r':
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void require_string(const nlohmann::ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error("SchemaViolation", std::string("missing or non-string key \"") + key + "\"");
  }
}

}  // namespace

std::string content_hash(std::string_view title, std::string_view abstract) {
  std::uint64_t hash = 14695981039346656037ULL;
  const auto mix = [&hash](std::string_view s) {
    for (const char c : s) {
      hash ^= static_cast<unsigned char>(c);
      hash *= 1099511628211ULL;
    }
  };
  mix(title);
  hash ^= 0x1f;
  hash *= 1099511628211ULL;
  mix(abstract);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

IngestResult ingest_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open CSV file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  // strip a UTF-8 BOM if present
  if (content.size() >= 3 && content.compare(0, 3, "\xEF\xBB\xBF") == 0) content.erase(0, 3);

  const auto rows = parse_csv(content);
  if (rows.empty()) throw Error("MissingColumn", "CSV has no header row");

  const std::vector<std::string>& header = rows.front();
  auto column = [&header](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower(normalize_whitespace(header[i])) == name) return i;
    }
    throw Error("MissingColumn", "CSV header lacks required column \"" + name + "\"");
  };
  const std::size_t col_title = column("titles");
  const std::size_t col_summary = column("summaries");
  const std::size_t col_terms = column("terms");

  IngestResult result;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      result.warnings.push_back("row " + std::to_string(r) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(row.size()) + "; skipped");
      ++result.skipped_rows;
      continue;
    }
    const std::string title = normalize_whitespace(row[col_title]);
    const std::string abstract = normalize_whitespace(row[col_summary]);
    if (title.empty() || abstract.empty()) {
      result.warnings.push_back("row " + std::to_string(r) + ": empty title or abstract; skipped");
      ++result.skipped_rows;
      continue;
    }
    TextSample sample;
    sample.id = content_hash(title, abstract);
    if (!seen_ids.insert(sample.id).second) {
      result.warnings.push_back("row " + std::to_string(r) + ": duplicate of earlier row; skipped");
      ++result.skipped_rows;
      continue;
    }
    sample.origin = "human";
    sample.task = "source";
    sample.text = abstract;
    sample.title = title;
    sample.meta["terms"] = normalize_whitespace(row[col_terms]);
    result.samples.push_back(std::move(sample));
  }
  return result;
}

std::vector<TextSample> sample_corpus(const std::vector<TextSample>& samples, std::size_t n,
                                      std::uint64_t seed) {
  if (n > samples.size()) {
    throw Error("NotEnoughSamples", "requested " + std::to_string(n) + " of " +
                                        std::to_string(samples.size()) + " samples");
  }
  std::vector<std::size_t> indices(samples.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<TextSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(samples[indices[i]]);
  std::sort(out.begin(), out.end(),
            [](const TextSample& a, const TextSample& b) { return a.id < b.id; });
  return out;
}

std::string build_prompt(const TextSample& sample, std::string_view task) {
  if (task == "rephrase") {
    if (sample.text.empty()) throw Error("MissingField", "rephrase prompt needs the abstract text");
    return "Rephrase: " + sample.text;
  }
  if (task == "generation") {
    if (!sample.title || sample.title->empty()) {
      throw Error("MissingField", "generation prompt needs the paper title");
    }
    return "Write an article abstract about: " + *sample.title;
  }
  throw Error("MissingField", "unknown task \"" + std::string(task) + "\"");
}

GenerationResult generate(const std::string& endpoint, const std::string& prompt,
                          const GenerationConfig& config, const GenerateOptions& options) {
  nlohmann::ordered_json body;
  if (!options.model_name.empty()) body["model"] = options.model_name;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config.temperature;
  body["top_p"] = config.top_p;
  body["max_tokens"] = config.max_new_tokens;
  if (!config.extra.empty()) body["extra"] = config.extra;
  const std::string payload = body.dump();

  std::string base_url = endpoint;
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    base_url = "http://" + base_url;
  }
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();

  httplib::Client client(base_url);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(300, 0);

  const auto start = std::chrono::steady_clock::now();
  std::string last_failure;
  for (int attempt = 1; attempt <= options.attempts; ++attempt) {
    auto res = client.Post("/v1/chat/completions", payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      nlohmann::ordered_json parsed;
      try {
        parsed = nlohmann::ordered_json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Error("EndpointError", "unparseable completion body: " + std::string(e.what()),
                    ErrorKind::Endpoint);
      }
      std::string text;
      if (parsed.contains("choices") && parsed["choices"].is_array() &&
          !parsed["choices"].empty()) {
        const auto& choice = parsed["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content")) {
          text = choice["message"]["content"].get<std::string>();
        } else if (choice.contains("text")) {
          text = choice["text"].get<std::string>();
        }
      }
      if (text.empty()) {
        throw Error("EmptyCompletion", "endpoint returned an empty completion",
                    ErrorKind::Endpoint);
      }
      GenerationResult out;
      out.text = std::move(text);
      out.attempts_used = attempt;
      out.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      return out;
    }
    if (res && res->status < 500) {
      throw Error("EndpointError",
                  "completion endpoint returned status " + std::to_string(res->status) + ": " +
                      res->body.substr(0, 200),
                  ErrorKind::Endpoint);
    }
    last_failure = res ? "status " + std::to_string(res->status)
                       : "connect: " + httplib::to_string(res.error());
    if (attempt < options.attempts) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(options.backoff_ms) << (attempt - 1)));
    }
  }
  throw Error("EndpointUnavailable",
              "completion endpoint failed after " + std::to_string(options.attempts) +
                  " attempts (" + last_failure + ")",
              ErrorKind::Endpoint);
}

std::vector<TextSample> generate_corpus(const std::vector<TextSample>& sources,
                                        const std::map<std::string, std::string>& model_urls,
                                        const GenerateCorpusOptions& options) {
  if (model_urls.empty()) {
    throw Error("MissingField", "generation needs at least one model endpoint");
  }

  struct Call {
    const TextSample* source;
    const std::string* task;
    const std::string* label;
    const std::string* url;
  };
  std::vector<Call> calls;
  for (const TextSample& source : sources) {
    for (const std::string& task : options.tasks) {
      for (const auto& [label, url] : model_urls) {
        calls.push_back({&source, &task, &label, &url});
      }
    }
  }

  // buffered into call order, so the saved corpus is independent of timing
  std::vector<TextSample> generated(calls.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex failure_mutex;
  std::optional<Error> failure;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= calls.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;  // stop issuing calls after the first failure
      }
      const Call& call = calls[i];
      try {
        GenerationConfig config = options.base_config;
        if (auto it = options.extra_by_model.find(*call.label);
            it != options.extra_by_model.end()) {
          config.extra = it->second;
        }
        const std::string prompt = build_prompt(*call.source, *call.task);
        GenerateOptions transport;
        transport.attempts = options.attempts;
        transport.backoff_ms = options.backoff_ms;
        transport.model_name = *call.label;
        const GenerationResult result = generate(*call.url, prompt, config, transport);

        TextSample sample;
        sample.origin = *call.label;
        sample.task = *call.task;
        sample.text = normalize_whitespace(result.text);
        if (sample.text.empty()) {
          throw Error("EmptyCompletion",
                      "endpoint for " + *call.label + " returned only whitespace",
                      ErrorKind::Endpoint);
        }
        if (*call.task == "rephrase") sample.reference = call.source->text;
        sample.title = call.source->title;
        sample.id = content_hash(call.source->id + "|" + *call.label + "|" + *call.task,
                                 sample.text);
        sample.meta["source_id"] = call.source->id;
        sample.meta["generation"] = config.to_json();
        sample.meta["endpoint"] = *call.url;
        sample.meta["attempts"] = result.attempts_used;
        generated[i] = std::move(sample);

        const std::size_t finished = done.fetch_add(1) + 1;
        if (options.progress) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          options.progress(finished, calls.size(), *call.label, *call.task, result.latency_ms);
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = e;
        return;
      }
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
  if (failure) throw *failure;

  std::vector<TextSample> output = sources;
  output.reserve(sources.size() + generated.size());
  for (TextSample& sample : generated) output.push_back(std::move(sample));
  return output;
}

nlohmann::ordered_json GenerationConfig::to_json() const {
  nlohmann::ordered_json j;
  j["temperature"] = temperature;
  j["top_p"] = top_p;
  j["max_new_tokens"] = max_new_tokens;
  j["extra"] = extra;
  return j;
}

GenerationConfig GenerationConfig::from_json(const nlohmann::ordered_json& j) {
  GenerationConfig config;
  if (j.contains("temperature")) config.temperature = j.at("temperature").get<double>();
  if (j.contains("top_p")) config.top_p = j.at("top_p").get<double>();
  if (j.contains("max_new_tokens")) config.max_new_tokens = j.at("max_new_tokens").get<int>();
  if (j.contains("extra")) config.extra = j.at("extra");
  return config;
}

nlohmann::ordered_json sample_to_json(const TextSample& sample) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["origin"] = sample.origin;
  j["task"] = sample.task;
  j["text"] = sample.text;
  if (sample.reference) j["reference"] = *sample.reference;
  if (sample.title) j["title"] = *sample.title;
  j["meta"] = sample.meta;
  return j;
}

TextSample sample_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw Error("SchemaViolation", "sample line is not a JSON object");
  static const std::vector<std::string> known = {"id",        "origin", "task", "text",
                                                 "reference", "title",  "meta"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error("SchemaViolation", "unknown key \"" + key + "\"");
    }
  }
  require_string(j, "id");
  require_string(j, "origin");
  require_string(j, "task");
  require_string(j, "text");

  TextSample sample;
  sample.id = j.at("id").get<std::string>();
  sample.origin = j.at("origin").get<std::string>();
  sample.task = j.at("task").get<std::string>();
  sample.text = j.at("text").get<std::string>();
  if (j.contains("reference")) {
    if (!j.at("reference").is_string()) throw Error("SchemaViolation", "non-string reference");
    sample.reference = j.at("reference").get<std::string>();
  }
  if (j.contains("title")) {
    if (!j.at("title").is_string()) throw Error("SchemaViolation", "non-string title");
    sample.title = j.at("title").get<std::string>();
  }
  if (j.contains("meta")) {
    if (!j.at("meta").is_object()) throw Error("SchemaViolation", "meta must be an object");
    sample.meta = j.at("meta");
  }
  if (sample.id.empty()) throw Error("SchemaViolation", "empty sample id");
  if (sample.task == "rephrase" && !sample.reference) {
    throw Error("SchemaViolation", "rephrase sample lacks a reference text");
  }
  if (sample.origin == "human" && sample.task != "source") {
    throw Error("SchemaViolation", "human samples must have task \"source\"");
  }
  return sample;
}

void save_samples(const std::vector<TextSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write samples file: " + path);
  for (const TextSample& sample : samples) {
    out << sample_to_json(sample).dump() << '\n';
  }
  if (!out) throw Error("IoError", "short write to samples file: " + path);
}

std::vector<TextSample> load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open samples file: " + path);
  std::vector<TextSample> samples;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
      samples.push_back(sample_from_json(j));
    } catch (const Error& e) {
      throw Error("SchemaViolation", path + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error("SchemaViolation",
                  path + " line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
    if (!seen_ids.insert(samples.back().id).second) {
      throw Error("SchemaViolation",
                  path + " line " + std::to_string(line_no) + ": duplicate id " + samples.back().id);
    }
  }
  return samples;
}

}  // namespace stylometer
