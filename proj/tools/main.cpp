// stylometer — stylometric analysis and AI-text detection toolkit.
//
// Pipeline subcommands: ingest -> sample -> generate -> analyze -> compare /
// detect / train-detector / plot. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 endpoint error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stylometer/corpus.hpp"
#include "stylometer/detectors.hpp"
#include "stylometer/errors.hpp"
#include "stylometer/http_clients.hpp"
#include "stylometer/metrics.hpp"
#include "stylometer/pipeline.hpp"
#include "stylometer/report.hpp"
#include "stylometer/results_store.hpp"
#include "stylometer/statistics.hpp"
#include "stylometer/version.hpp"

namespace sm = stylometer;

namespace {

using ConfigMap = std::map<std::string, std::string>;

// The optional JSON config mirrors the long flag names:
//   {"jobs": 4, "scorer-url": "http://localhost:8000", ...}
// Command-line flags always win over config values.
ConfigMap load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
      break;
    }
    if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
      break;
    }
  }
  ConfigMap map;
  if (path.empty()) return map;
  std::ifstream in(path);
  if (!in) throw sm::Error("IoError", "cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw sm::Error("SchemaViolation", "bad config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw sm::Error("SchemaViolation", "config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    map[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return map;
}

std::string cfg(const ConfigMap& map, const std::string& key, const std::string& fallback) {
  auto it = map.find(key);
  return it != map.end() ? it->second : fallback;
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

struct EndpointFlags {
  std::string scorer_url;
  std::string embed_url;
  std::string grammar_url;
  std::size_t ngram_order = 2;
  double ngram_k = 1.0;
  std::size_t embed_dim = 64;
};

void add_endpoint_flags(CLI::App* sub, EndpointFlags& flags, const ConfigMap& config) {
  flags.scorer_url = env_or("STYLOMETER_SCORER_URL", cfg(config, "scorer-url", ""));
  flags.embed_url = env_or("STYLOMETER_EMBED_URL", cfg(config, "embed-url", ""));
  flags.grammar_url = env_or("STYLOMETER_GRAMMAR_URL", cfg(config, "grammar-url", ""));
  flags.ngram_order = static_cast<std::size_t>(std::stoul(cfg(config, "ngram-order", "2")));
  flags.ngram_k = std::stod(cfg(config, "ngram-k", "1"));
  flags.embed_dim = static_cast<std::size_t>(std::stoul(cfg(config, "embed-dim", "64")));
  sub->add_option("--scorer-url", flags.scorer_url,
                  "external LM scorer endpoint (default: built-in n-gram scorer)");
  sub->add_option("--embed-url", flags.embed_url,
                  "external embedding endpoint (default: built-in hash embedder)");
  sub->add_option("--grammar-url", flags.grammar_url,
                  "LanguageTool-compatible endpoint (default: built-in rule checker)");
  sub->add_option("--ngram-order", flags.ngram_order, "built-in scorer n-gram order");
  sub->add_option("--ngram-k", flags.ngram_k, "built-in scorer add-k constant");
  sub->add_option("--embed-dim", flags.embed_dim, "built-in embedder dimension");
}

int run_ingest(const std::string& csv_path, const std::string& out_path) {
  const sm::IngestResult result = sm::ingest_csv(csv_path);
  for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
  sm::save_samples(result.samples, out_path);
  std::cout << "ingested " << result.samples.size() << " samples ("
            << result.skipped_rows << " rows skipped) -> " << out_path << "\n";
  return 0;
}

int run_sample(const std::string& in_path, std::size_t n, std::uint64_t seed,
               const std::string& out_path) {
  const auto samples = sm::load_samples(in_path);
  const auto chosen = sm::sample_corpus(samples, n, seed);
  sm::save_samples(chosen, out_path);
  std::cout << "sampled " << chosen.size() << " of " << samples.size() << " (seed " << seed
            << ") -> " << out_path << "\n";
  return 0;
}

int run_generate(const std::string& in_path, const std::string& out_path,
                 const std::vector<std::string>& model_urls,
                 const std::vector<std::string>& extras, const std::vector<std::string>& tasks,
                 double temperature, double top_p, int max_new_tokens, int attempts,
                 int backoff_ms, int jobs) {
  std::map<std::string, std::string> models;
  for (const std::string& entry : model_urls) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw sm::Error("MissingField", "--model-url expects label=url, got: " + entry,
                      sm::ErrorKind::Usage);
    }
    models[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  if (models.empty()) {
    throw sm::Error("MissingField", "generate needs at least one --model-url",
                    sm::ErrorKind::Usage);
  }
  std::map<std::string, nlohmann::ordered_json> extra_by_model;
  for (const std::string& entry : extras) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw sm::Error("MissingField", "--extra expects label=json, got: " + entry,
                      sm::ErrorKind::Usage);
    }
    try {
      extra_by_model[entry.substr(0, eq)] = nlohmann::ordered_json::parse(entry.substr(eq + 1));
    } catch (const nlohmann::json::exception& e) {
      throw sm::Error("SchemaViolation", "bad --extra JSON: " + std::string(e.what()));
    }
  }

  const auto sources = sm::load_samples(in_path);

  sm::GenerateCorpusOptions options;
  options.tasks = tasks;
  options.base_config.temperature = temperature;
  options.base_config.top_p = top_p;
  options.base_config.max_new_tokens = max_new_tokens;
  options.extra_by_model = extra_by_model;
  options.attempts = attempts;
  options.backoff_ms = backoff_ms;
  options.jobs = jobs;
  options.progress = [](std::size_t done, std::size_t total, const std::string& label,
                        const std::string& task, double latency_ms) {
    std::cerr << "generated " << done << "/" << total << " (" << label << ", " << task << ", "
              << latency_ms << " ms)\n";
  };

  const auto output = sm::generate_corpus(sources, models, options);
  sm::save_samples(output, out_path);
  std::cout << "generated " << (output.size() - sources.size()) << " samples over "
            << sources.size() << " sources -> " << out_path << "\n";
  return 0;
}

int run_analyze(const std::string& corpus_path, const std::string& out_path,
                const EndpointFlags& endpoints, int jobs, const std::string& detect_config_path,
                bool with_detectgpt) {
  std::vector<sm::TextSample> samples;
  try {
    samples = sm::load_samples(corpus_path);
  } catch (const sm::Error& e) {
    throw sm::Error("CorpusUnreadable", e.what());
  }

  // scorer: external endpoint when configured, otherwise the add-k n-gram
  // reference model trained on the corpus itself
  std::unique_ptr<sm::LmScorer> scorer;
  if (!endpoints.scorer_url.empty()) {
    scorer = std::make_unique<sm::HttpScorer>(endpoints.scorer_url);
  } else {
    std::vector<sm::TokenSequence> texts;
    texts.reserve(samples.size());
    for (const sm::TextSample& s : samples) texts.push_back(sm::tokenize(s.text));
    scorer = std::make_unique<sm::NGramModel>(
        sm::train_ngram(texts, endpoints.ngram_order, endpoints.ngram_k));
  }
  std::unique_ptr<sm::Embedder> embedder;
  if (!endpoints.embed_url.empty()) {
    embedder = std::make_unique<sm::HttpEmbedder>(endpoints.embed_url);
  } else {
    embedder = std::make_unique<sm::HashEmbedder>(endpoints.embed_dim);
  }
  std::unique_ptr<sm::GrammarChecker> checker;
  if (!endpoints.grammar_url.empty()) {
    checker = std::make_unique<sm::HttpGrammarChecker>(endpoints.grammar_url);
  } else {
    checker = std::make_unique<sm::RuleGrammarChecker>();
  }

  sm::AnalyzeOptions options;
  options.jobs = jobs;
  if (!detect_config_path.empty()) {
    options.detectgpt = sm::DetectorConfig::load(detect_config_path).detectgpt;
  } else if (with_detectgpt) {
    options.detectgpt = sm::DetectGptConfig{};
  }
  options.progress = [](std::size_t done, std::size_t total) {
    if (done % 50 == 0 || done == total) std::cerr << "analyzed " << done << "/" << total << "\n";
  };

  const auto records = sm::analyze_corpus(samples, *scorer, *embedder, *checker, options);
  sm::save_results(records, out_path);

  std::size_t failed = 0;
  for (const sm::ResultsRecord& r : records) {
    if (r.error) {
      ++failed;
      std::cerr << "failed sample " << r.id << ": " << *r.error << "\n";
    }
  }
  std::cout << "analyzed " << (records.size() - failed) << " samples (" << failed
            << " failures) -> " << out_path << "\n";
  return 0;
}

int run_compare(const std::string& results_path, const std::string& json_out,
                const std::string& text_out) {
  const auto records = sm::load_results(results_path);
  const sm::ReportTable table = sm::build_report(records);
  const std::string text = sm::render_text(table);
  if (!text_out.empty()) {
    std::ofstream out(text_out, std::ios::binary);
    if (!out) throw sm::Error("IoError", "cannot write " + text_out);
    out << text;
  }
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    if (!out) throw sm::Error("IoError", "cannot write " + json_out);
    out << sm::render_json(table).dump(2) << '\n';
  }
  std::cout << text;
  return 0;
}

int run_plot(const std::string& results_path, const std::string& out_dir) {
  const auto records = sm::load_results(results_path);
  const auto written = sm::emit_boxplots(records, out_dir);
  std::cout << "wrote " << written.size() << " SVG files to " << out_dir << "\n";
  return 0;
}

int run_train_detector(const std::string& results_path, const std::string& model_out,
                       const std::string& features_csv, double learning_rate, int max_iters,
                       double tolerance) {
  const auto records = sm::load_results(results_path);
  std::vector<std::string> feature_names;
  {
    std::string item;
    std::istringstream in(features_csv);
    while (std::getline(in, item, ',')) {
      if (!item.empty()) feature_names.push_back(item);
    }
  }
  if (feature_names.empty()) {
    throw sm::Error("MissingField", "--features must name at least one metric",
                    sm::ErrorKind::Usage);
  }

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::size_t skipped = 0;
  for (const sm::ResultsRecord& r : records) {
    if (!r.metrics) continue;
    if (r.origin.empty()) throw sm::Error("MissingLabels", "record " + r.id + " has no origin");
    std::vector<double> row;
    bool complete = true;
    for (const std::string& name : feature_names) {
      if (const auto v = r.metrics->get(name)) {
        row.push_back(*v);
      } else {
        complete = false;
        break;
      }
    }
    if (!complete) {
      ++skipped;
      continue;
    }
    features.push_back(std::move(row));
    labels.push_back(r.origin == "human" ? 0 : 1);
  }
  if (features.empty()) throw sm::Error("MissingLabels", "no usable training records");

  sm::TrainOptions options;
  options.learning_rate = learning_rate;
  options.max_iters = max_iters;
  options.tolerance = tolerance;
  options.feature_names = feature_names;
  const sm::LogisticModel model = sm::train_logistic(features, labels, options);
  model.save(model_out);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int predicted = model.predict(features[i]) > 0.5 ? 1 : 0;
    if (predicted == labels[i]) ++correct;
  }
  std::cout << "trained on " << features.size() << " records (" << skipped
            << " skipped), training accuracy "
            << static_cast<double>(correct) / static_cast<double>(features.size()) << " -> "
            << model_out << "\n";
  return 0;
}

int run_detect(const std::string& results_path, const std::string& model_path,
               const std::string& config_path, std::optional<double> threshold,
               const std::string& out_path, const std::string& json_out) {
  const auto records = sm::load_results(results_path);
  sm::DetectorConfig config;
  if (!config_path.empty()) config = sm::DetectorConfig::load(config_path);
  std::optional<sm::LogisticModel> model;
  if (!model_path.empty()) model = sm::LogisticModel::load(model_path);

  const sm::DetectOutcome outcome = sm::run_detection(records, config, model, threshold);
  if (!out_path.empty()) sm::save_results(outcome.records, out_path);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    if (!out) throw sm::Error("IoError", "cannot write " + json_out);
    out << sm::render_confusion_json(outcome.confusion).dump(2) << '\n';
  }
  for (const std::string& id : outcome.skipped) {
    std::cerr << "skipped sample " << id << " (no usable features or scores)\n";
  }
  std::cout << sm::render_confusion_text(outcome.confusion);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ConfigMap config;
  try {
    config = load_config(argc, argv);
  } catch (const sm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"stylometer — stylometric analysis and AI-text detection toolkit"};
  app.set_version_flag("--version", sm::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file mirroring the long flag names");

  std::uint64_t seed = static_cast<std::uint64_t>(std::stoull(cfg(config, "seed", "42")));
  int jobs = std::stoi(cfg(config, "jobs", "1"));
  app.add_option("--seed", seed, "seed for corpus sampling")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for per-sample analysis")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "read the abstracts CSV into a sample corpus");
  std::string ingest_csv_path = cfg(config, "csv", "");
  std::string ingest_out = cfg(config, "out", "corpus.jsonl");
  ingest->add_option("--csv", ingest_csv_path, "input CSV (titles, summaries, terms)")->required();
  ingest->add_option("--out", ingest_out, "output samples JSONL")->capture_default_str();

  // sample
  auto* sample = app.add_subcommand("sample", "seeded subsample of a corpus");
  std::string sample_in = cfg(config, "in", "corpus.jsonl");
  std::string sample_out = cfg(config, "out", "sampled.jsonl");
  std::size_t sample_n = static_cast<std::size_t>(std::stoull(cfg(config, "n", "500")));
  sample->add_option("--in", sample_in, "input samples JSONL")->capture_default_str();
  sample->add_option("--n", sample_n, "number of samples to keep")->capture_default_str();
  sample->add_option("--out", sample_out, "output samples JSONL")->capture_default_str();

  // generate
  auto* generate = app.add_subcommand("generate", "produce model texts for each source sample");
  std::string generate_in = cfg(config, "in", "sampled.jsonl");
  std::string generate_out = cfg(config, "out", "generated.jsonl");
  std::vector<std::string> model_urls;
  std::vector<std::string> model_extras;
  std::vector<std::string> task_list = {"rephrase", "generation"};
  double gen_temperature = std::stod(cfg(config, "temperature", "0.0"));
  double gen_top_p = std::stod(cfg(config, "top-p", "1.0"));
  int gen_max_new_tokens = std::stoi(cfg(config, "max-new-tokens", "128"));
  int gen_attempts = std::stoi(cfg(config, "attempts", "3"));
  int gen_backoff = std::stoi(cfg(config, "backoff-ms", "250"));
  generate->add_option("--in", generate_in, "source samples JSONL")->capture_default_str();
  generate->add_option("--out", generate_out, "output corpus JSONL (sources + generated)")
      ->capture_default_str();
  generate->add_option("--model-url", model_urls, "model endpoint as label=url (repeatable)");
  generate->add_option("--extra", model_extras,
                       "extra decoder fields as label={json}, passed through verbatim");
  generate->add_option("--tasks", task_list, "tasks to run")->delimiter(',')->capture_default_str();
  generate->add_option("--temperature", gen_temperature, "decoding temperature")
      ->capture_default_str();
  generate->add_option("--top-p", gen_top_p, "nucleus sampling mass")->capture_default_str();
  generate->add_option("--max-new-tokens", gen_max_new_tokens, "completion length limit")
      ->capture_default_str();
  generate->add_option("--attempts", gen_attempts, "attempts per call before giving up")
      ->capture_default_str();
  generate->add_option("--backoff-ms", gen_backoff, "initial retry backoff, doubled per attempt")
      ->capture_default_str();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "compute the metric suite for every sample");
  std::string analyze_corpus_path = cfg(config, "corpus", "corpus.jsonl");
  std::string analyze_out = cfg(config, "out", "results.jsonl");
  std::string analyze_detect_config = cfg(config, "detect-config", "");
  bool analyze_with_detectgpt = false;
  EndpointFlags analyze_endpoints;
  analyze->add_option("--corpus", analyze_corpus_path, "corpus JSONL to analyze")
      ->capture_default_str();
  analyze->add_option("--out", analyze_out, "output results JSONL")->capture_default_str();
  add_endpoint_flags(analyze, analyze_endpoints, config);
  analyze->add_option("--detect-config", analyze_detect_config,
                      "detector config JSON; enables perturbation-discrepancy scoring");
  analyze->add_flag("--with-detectgpt", analyze_with_detectgpt,
                    "score perturbation discrepancy with default settings");

  // compare
  auto* compare = app.add_subcommand("compare", "summary table with pairwise rank tests");
  std::string compare_results = cfg(config, "results", "results.jsonl");
  std::string compare_json = cfg(config, "json-out", "");
  std::string compare_text = cfg(config, "text-out", "");
  compare->add_option("--results", compare_results, "results JSONL")->capture_default_str();
  compare->add_option("--json-out", compare_json, "write the table as JSON");
  compare->add_option("--text-out", compare_text, "write the rendered text table");

  // plot
  auto* plot = app.add_subcommand("plot", "SVG box plots per task and metric");
  std::string plot_results = cfg(config, "results", "results.jsonl");
  std::string plot_dir = cfg(config, "out-dir", "plots");
  plot->add_option("--results", plot_results, "results JSONL")->capture_default_str();
  plot->add_option("--out-dir", plot_dir, "output directory")->capture_default_str();

  // train-detector
  auto* train = app.add_subcommand("train-detector",
                                   "fit the perplexity/burstiness logistic classifier");
  std::string train_results = cfg(config, "results", "results.jsonl");
  std::string train_out = cfg(config, "out", "detector_model.json");
  std::string train_features = cfg(config, "features", "mean_sentence_pp,burstiness_len_cv");
  double train_lr = std::stod(cfg(config, "learning-rate", "0.1"));
  int train_iters = std::stoi(cfg(config, "max-iters", "5000"));
  double train_tol = std::stod(cfg(config, "tolerance", "1e-7"));
  train->add_option("--results", train_results, "labeled results JSONL")->capture_default_str();
  train->add_option("--out", train_out, "output model JSON")->capture_default_str();
  train->add_option("--features", train_features, "comma-separated metric names")
      ->capture_default_str();
  train->add_option("--learning-rate", train_lr, "gradient-descent step size")
      ->capture_default_str();
  train->add_option("--max-iters", train_iters, "iteration cap")->capture_default_str();
  train->add_option("--tolerance", train_tol, "stop when the gradient inf-norm drops below")
      ->capture_default_str();

  // detect
  auto* detect = app.add_subcommand("detect", "apply detectors and report confusion per origin");
  std::string detect_results = cfg(config, "results", "results.jsonl");
  std::string detect_model = cfg(config, "model", "");
  std::string detect_config_path = cfg(config, "detector-config", "");
  std::string detect_out = cfg(config, "out", "");
  std::string detect_json = cfg(config, "json-out", "");
  double detect_threshold = 0.0;
  detect->add_option("--results", detect_results, "results JSONL")->capture_default_str();
  detect->add_option("--model", detect_model, "trained classifier JSON");
  detect->add_option("--detector-config", detect_config_path, "detector config JSON");
  auto* threshold_opt =
      detect->add_option("--threshold", detect_threshold,
                         "override the decision threshold of every applied detector");
  detect->add_option("--out", detect_out, "write records with fresh verdicts");
  detect->add_option("--json-out", detect_json, "write the confusion summary as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors -> 1
  }

  try {
    if (ingest->parsed()) return run_ingest(ingest_csv_path, ingest_out);
    if (sample->parsed()) return run_sample(sample_in, sample_n, seed, sample_out);
    if (generate->parsed()) {
      return run_generate(generate_in, generate_out, model_urls, model_extras, task_list,
                          gen_temperature, gen_top_p, gen_max_new_tokens, gen_attempts,
                          gen_backoff, jobs);
    }
    if (analyze->parsed()) {
      return run_analyze(analyze_corpus_path, analyze_out, analyze_endpoints, jobs,
                         analyze_detect_config, analyze_with_detectgpt);
    }
    if (compare->parsed()) return run_compare(compare_results, compare_json, compare_text);
    if (plot->parsed()) return run_plot(plot_results, plot_dir);
    if (train->parsed()) {
      return run_train_detector(train_results, train_out, train_features, train_lr, train_iters,
                                train_tol);
    }
    if (detect->parsed()) {
      std::optional<double> threshold;
      if (threshold_opt->count() > 0) threshold = detect_threshold;
      return run_detect(detect_results, detect_model, detect_config_path, threshold, detect_out,
                        detect_json);
    }
  } catch (const sm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case sm::ErrorKind::Usage: return 1;
      case sm::ErrorKind::Data: return 2;
      case sm::ErrorKind::Endpoint: return 3;
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
