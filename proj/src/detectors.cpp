#include "stylometer/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "stylometer/errors.hpp"
#include "stylometer/metrics.hpp"

namespace stylometer {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ln(1 + e^z) without overflow
double log1p_exp(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sum(const std::vector<double>& values) {
  double total = 0.0;
  for (const double v : values) total += v;
  return total;
}

}  // namespace

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable instance = [] {
    SynonymTable t;
    t.add("big", {"large", "huge"});
    t.add("large", {"big", "sizable"});
    t.add("small", {"little", "tiny"});
    t.add("fast", {"quick", "rapid"});
    t.add("quick", {"fast", "swift"});
    t.add("slow", {"sluggish"});
    t.add("good", {"strong", "solid"});
    t.add("bad", {"poor", "weak"});
    t.add("new", {"novel", "recent"});
    t.add("novel", {"new"});
    t.add("old", {"prior", "earlier"});
    t.add("important", {"significant", "crucial"});
    t.add("significant", {"notable", "important"});
    t.add("method", {"approach", "technique"});
    t.add("approach", {"method", "strategy"});
    t.add("result", {"outcome", "finding"});
    t.add("results", {"outcomes", "findings"});
    t.add("show", {"demonstrate", "indicate"});
    t.add("shows", {"demonstrates", "indicates"});
    t.add("showed", {"demonstrated"});
    t.add("use", {"employ", "apply"});
    t.add("uses", {"employs", "applies"});
    t.add("using", {"employing", "applying"});
    t.add("improve", {"enhance", "boost"});
    t.add("improves", {"enhances"});
    t.add("propose", {"introduce", "present"});
    t.add("proposed", {"introduced", "presented"});
    t.add("model", {"system", "framework"});
    t.add("models", {"systems", "frameworks"});
    t.add("data", {"evidence", "observations"});
    t.add("paper", {"article", "study"});
    t.add("study", {"analysis", "investigation"});
    t.add("task", {"problem", "objective"});
    t.add("high", {"elevated", "great"});
    t.add("low", {"reduced", "modest"});
    t.add("many", {"numerous", "several"});
    t.add("often", {"frequently", "commonly"});
    t.add("however", {"nevertheless", "nonetheless"});
    t.add("also", {"additionally", "furthermore"});
    t.add("can", {"may"});
    t.add("cat", {"feline"});
    t.add("dog", {"canine"});
    return t;
  }();
  return instance;
}

SynonymTable SynonymTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open synonym table: " + path);
  SynonymTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string headword;
    if (!(ls >> headword)) continue;
    std::string rest;
    std::getline(ls, rest);
    std::vector<std::string> synonyms;
    std::string item;
    std::istringstream items(rest);
    while (std::getline(items, item, ',')) {
      std::string trimmed;
      for (const char c : item) {
        if (c != ' ' && c != '\t' && c != '\r') trimmed += c;
      }
      if (!trimmed.empty()) synonyms.push_back(trimmed);
    }
    if (!synonyms.empty()) t.add(headword, std::move(synonyms));
  }
  return t;
}

void SynonymTable::add(std::string_view word, std::vector<std::string> synonyms) {
  table_[std::string(word)] = std::move(synonyms);
}

const std::vector<std::string>* SynonymTable::lookup(const std::string& word) const {
  auto it = table_.find(word);
  return it != table_.end() ? &it->second : nullptr;
}

std::string perturb_baseline(std::string_view text, std::uint64_t seed, double rho,
                             const SynonymTable& table) {
  if (text.empty()) throw Error("EmptyInput", "cannot perturb empty text");
  std::vector<std::string> tokens = tokenize(text).texts();
  const std::size_t n = tokens.size();
  if (n == 0) throw Error("EmptyInput", "text has no word tokens");

  std::size_t m = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n)));
  if (m == 0) return std::string(text);
  if (m > n) m = n;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<std::size_t> selected(indices.begin(),
                                    indices.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(selected.begin(), selected.end());

  std::vector<bool> dropped(n, false);
  for (const std::size_t pos : selected) {
    if (const std::vector<std::string>* synonyms = table.lookup(tokens[pos])) {
      tokens[pos] = (*synonyms)[static_cast<std::size_t>(rng() % synonyms->size())];
    } else {
      dropped[pos] = true;
    }
  }

  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (dropped[i]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

nlohmann::ordered_json DetectorConfig::to_json() const {
  nlohmann::ordered_json j;
  j["detectgpt"] = {{"k", detectgpt.num_perturbations},
                    {"rho", detectgpt.replacement_fraction},
                    {"threshold", detectgpt.threshold},
                    {"seed", detectgpt.base_seed}};
  j["gptzero"] = {{"threshold", gptzero.threshold}};
  return j;
}

DetectorConfig DetectorConfig::from_json(const nlohmann::ordered_json& j) {
  DetectorConfig config;
  if (j.contains("detectgpt")) {
    const auto& d = j.at("detectgpt");
    if (d.contains("k")) config.detectgpt.num_perturbations = d.at("k").get<int>();
    if (d.contains("rho")) config.detectgpt.replacement_fraction = d.at("rho").get<double>();
    if (d.contains("threshold")) config.detectgpt.threshold = d.at("threshold").get<double>();
    if (d.contains("seed")) config.detectgpt.base_seed = d.at("seed").get<std::uint64_t>();
  }
  if (j.contains("gptzero")) {
    const auto& g = j.at("gptzero");
    if (g.contains("threshold")) config.gptzero.threshold = g.at("threshold").get<double>();
  }
  return config;
}

DetectorConfig DetectorConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open detector config: " + path);
  try {
    nlohmann::ordered_json j;
    in >> j;
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaViolation", "bad detector config " + path + ": " + e.what());
  }
}

nlohmann::ordered_json DetectorVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["detector"] = detector_name;
  j["score"] = score;
  j["threshold"] = threshold;
  j["label"] = label;
  return j;
}

DetectorVerdict DetectorVerdict::from_json(const nlohmann::ordered_json& j) {
  DetectorVerdict v;
  v.detector_name = j.at("detector").get<std::string>();
  v.score = j.at("score").get<double>();
  v.threshold = j.at("threshold").get<double>();
  v.label = j.at("label").get<std::string>();
  return v;
}

std::string verdict_label(double score, double threshold) {
  return score > threshold ? "ai" : "human";
}

DetectorVerdict detect_gpt_score(const LmScorer& scorer, const Perturber& perturber,
                                 std::string_view text, const DetectGptConfig& config) {
  if (text.empty()) throw Error("EmptyInput", "cannot score empty text");
  if (config.num_perturbations < 1) {
    throw Error("InvalidConfig", "detectgpt needs at least one perturbation");
  }

  const ScoredText scored = scorer.score_text(text);
  if (scored.logprobs.empty()) throw Error("EmptyInput", "text has no scorable tokens");
  const double text_logprob = sum(scored.logprobs);

  // mean of per-perturbation differences: exact zero under the identity
  // perturber, algebraically equal to log P(x) - mean(log P(x_i))
  double diff_sum = 0.0;
  for (int i = 0; i < config.num_perturbations; ++i) {
    const std::string variant = perturber.perturb(text, config.base_seed + static_cast<std::uint64_t>(i));
    const ScoredText variant_scored = scorer.score_text(variant);
    if (variant_scored.logprobs.empty()) {
      throw Error("EmptyInput", "perturbation produced an unscorable text");
    }
    diff_sum += text_logprob - sum(variant_scored.logprobs);
  }

  DetectorVerdict verdict;
  verdict.detector_name = "detectgpt";
  verdict.score = diff_sum / static_cast<double>(config.num_perturbations);
  verdict.threshold = config.threshold;
  verdict.label = verdict_label(verdict.score, verdict.threshold);
  return verdict;
}

std::vector<double> gptzero_features(const TextSample& sample, const LmScorer& scorer) {
  const SentenceList sentences = split_sentences(sample.text);
  if (sentences.size() < 2) {
    throw Error("TooFewSentences", "classifier features need at least 2 sentences");
  }
  const PerplexityResult pp = sentence_perplexities(scorer, sentences);
  const double mean_pp = sum(pp.sentence_pps) / static_cast<double>(pp.sentence_pps.size());
  return {mean_pp, burstiness_len_cv(sentences)};
}

std::vector<double> LogisticModel::standardize(const std::vector<double>& raw) const {
  if (raw.size() != weights.size()) {
    throw Error("DimensionMismatch", "feature vector has dimension " + std::to_string(raw.size()) +
                                         ", model expects " + std::to_string(weights.size()));
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = (raw[i] - feature_means[i]) / feature_stds[i];
  }
  return out;
}

double LogisticModel::predict(const std::vector<double>& raw) const {
  const std::vector<double> z = standardize(raw);
  double activation = bias;
  for (std::size_t i = 0; i < z.size(); ++i) activation += weights[i] * z[i];
  return sigmoid(activation);
}

nlohmann::ordered_json LogisticModel::to_json() const {
  nlohmann::ordered_json j;
  j["weights"] = weights;
  j["bias"] = bias;
  j["feature_means"] = feature_means;
  j["feature_stds"] = feature_stds;
  j["feature_names"] = feature_names;
  return j;
}

LogisticModel LogisticModel::from_json(const nlohmann::ordered_json& j) {
  LogisticModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.feature_means = j.at("feature_means").get<std::vector<double>>();
  m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (m.weights.size() != m.feature_means.size() || m.weights.size() != m.feature_stds.size()) {
    throw Error("ModelUnreadable", "inconsistent model dimensions");
  }
  for (const double s : m.feature_stds) {
    if (!(s > 0.0)) throw Error("ModelUnreadable", "standardization std must be > 0");
  }
  return m;
}

void LogisticModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write model file: " + path);
  out << to_json().dump(2) << '\n';
}

LogisticModel LogisticModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("ModelUnreadable", "cannot open model file: " + path);
  try {
    nlohmann::ordered_json j;
    in >> j;
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error("ModelUnreadable", "bad model file " + path + ": " + e.what());
  }
}

double logistic_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& weights, double bias) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * X[i][k];
    // -[y ln p + (1-y) ln(1-p)] = ln(1+e^z) - y z
    loss += log1p_exp(z) - static_cast<double>(y[i]) * z;
  }
  return loss / static_cast<double>(X.size());
}

void logistic_gradient(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       std::vector<double>& grad_weights, double& grad_bias) {
  grad_weights.assign(weights.size(), 0.0);
  grad_bias = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * X[i][k];
    const double residual = sigmoid(z) - static_cast<double>(y[i]);
    for (std::size_t k = 0; k < weights.size(); ++k) grad_weights[k] += residual * X[i][k];
    grad_bias += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (double& g : grad_weights) g *= inv_n;
  grad_bias *= inv_n;
}

LogisticModel train_logistic(const std::vector<std::vector<double>>& features,
                             const std::vector<int>& labels, const TrainOptions& options) {
  if (features.empty() || features.size() != labels.size()) {
    throw Error("EmptyInput", "training needs one label per feature vector");
  }
  const std::size_t dim = features.front().size();
  if (dim == 0) throw Error("EmptyInput", "feature vectors are empty");

  bool has_positive = false;
  bool has_negative = false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) {
      throw Error("DimensionMismatch", "feature vectors have mixed dimensions");
    }
    for (const double v : features[i]) {
      if (!std::isfinite(v)) throw Error("NonFiniteFeature", "feature value is not finite");
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error("DegenerateLabels", "labels must be 0 or 1");
    }
    (labels[i] == 1 ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative) {
    throw Error("DegenerateLabels", "training needs at least one example of each class");
  }

  LogisticModel model;
  model.feature_names = options.feature_names;
  if (model.feature_names.empty()) {
    for (std::size_t k = 0; k < dim; ++k) model.feature_names.push_back("f" + std::to_string(k));
  }
  model.feature_means.assign(dim, 0.0);
  model.feature_stds.assign(dim, 0.0);
  const double n = static_cast<double>(features.size());
  for (const auto& row : features) {
    for (std::size_t k = 0; k < dim; ++k) model.feature_means[k] += row[k];
  }
  for (std::size_t k = 0; k < dim; ++k) model.feature_means[k] /= n;
  for (const auto& row : features) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = row[k] - model.feature_means[k];
      model.feature_stds[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < dim; ++k) {
    model.feature_stds[k] = std::sqrt(model.feature_stds[k] / n);
    if (!(model.feature_stds[k] > 0.0)) model.feature_stds[k] = 1.0;  // constant column
  }

  std::vector<std::vector<double>> X(features.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      X[i][k] = (features[i][k] - model.feature_means[k]) / model.feature_stds[k];
    }
  }

  model.weights.assign(dim, 0.0);
  model.bias = 0.0;
  std::vector<double> grad(dim, 0.0);
  double grad_bias = 0.0;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    logistic_gradient(X, labels, model.weights, model.bias, grad, grad_bias);
    double inf_norm = std::abs(grad_bias);
    for (const double g : grad) inf_norm = std::max(inf_norm, std::abs(g));
    if (inf_norm < options.tolerance) break;
    for (std::size_t k = 0; k < dim; ++k) model.weights[k] -= options.learning_rate * grad[k];
    model.bias -= options.learning_rate * grad_bias;
  }
  return model;
}

DetectorVerdict classify(const LogisticModel& model, const std::vector<double>& features,
                         double threshold) {
  DetectorVerdict verdict;
  verdict.detector_name = "gptzero";
  verdict.score = model.predict(features);
  verdict.threshold = threshold;
  verdict.label = verdict_label(verdict.score, verdict.threshold);
  return verdict;
}

}  // namespace stylometer
