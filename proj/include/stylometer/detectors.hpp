#ifndef STYLOMETER_DETECTORS_HPP
#define STYLOMETER_DETECTORS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stylometer/corpus.hpp"
#include "stylometer/lm_scoring.hpp"

namespace stylometer {

// Meaning-preserving text perturbation, deterministic given (text, seed).
class Perturber {
 public:
  virtual ~Perturber() = default;
  virtual std::string perturb(std::string_view text, std::uint64_t seed) const = 0;
};

// Returns the input unchanged; pins the D(x) = 0 identity.
class IdentityPerturber final : public Perturber {
 public:
  std::string perturb(std::string_view text, std::uint64_t) const override {
    return std::string(text);
  }
};

// Headword -> synonym candidates. File format: headword, whitespace, then a
// comma-separated synonym list per line; '#' starts a comment.
class SynonymTable {
 public:
  static const SynonymTable& builtin();
  static SynonymTable from_file(const std::string& path);

  void add(std::string_view word, std::vector<std::string> synonyms);
  const std::vector<std::string>* lookup(const std::string& word) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Seeded word-level perturbation: ceil(rho * N) token positions are chosen
// by a partial Fisher-Yates over token indices (std::mt19937_64(seed),
// j = i + rng() % (N - i)). Each selected position, in ascending order, is
// replaced by a table synonym (one rng draw picks among the candidates) or
// dropped when the table has no entry. Output is the surviving lowercased
// tokens joined with single spaces; ceil(rho * N) == 0 returns the input
// verbatim.
std::string perturb_baseline(std::string_view text, std::uint64_t seed, double rho,
                             const SynonymTable& table = SynonymTable::builtin());

class SynonymPerturber final : public Perturber {
 public:
  explicit SynonymPerturber(double replacement_fraction,
                            const SynonymTable& table = SynonymTable::builtin())
      : rho_(replacement_fraction), table_(&table) {}
  std::string perturb(std::string_view text, std::uint64_t seed) const override {
    return perturb_baseline(text, seed, rho_, *table_);
  }
  double replacement_fraction() const { return rho_; }

 private:
  double rho_;
  const SynonymTable* table_;
};

struct DetectGptConfig {
  int num_perturbations = 10;        // K
  double replacement_fraction = 0.15;  // rho
  double threshold = 0.0;
  std::uint64_t base_seed = 1;       // perturbation i uses seed base_seed + i
};

struct GptZeroConfig {
  double threshold = 0.5;
};

// Detector settings file: {"detectgpt": {"k", "rho", "threshold", "seed"?},
// "gptzero": {"threshold"}}.
struct DetectorConfig {
  DetectGptConfig detectgpt;
  GptZeroConfig gptzero;

  nlohmann::ordered_json to_json() const;
  static DetectorConfig from_json(const nlohmann::ordered_json& j);
  static DetectorConfig load(const std::string& path);
};

struct DetectorVerdict {
  std::string detector_name;
  double score = 0.0;      // D(x) or class probability
  double threshold = 0.0;
  std::string label;       // "ai" iff score > threshold (ties -> "human")

  bool operator==(const DetectorVerdict& other) const = default;

  nlohmann::ordered_json to_json() const;
  static DetectorVerdict from_json(const nlohmann::ordered_json& j);
};

std::string verdict_label(double score, double threshold);

// Perturbation-discrepancy score: log P(x) minus the mean log-probability of
// K seeded perturbations, computed as the mean of per-perturbation
// differences so the identity perturber yields exactly zero.
DetectorVerdict detect_gpt_score(const LmScorer& scorer, const Perturber& perturber,
                                 std::string_view text, const DetectGptConfig& config);

// [mean sentence perplexity, sentence-length CV] — the perplexity/burstiness
// feature pair the learned classifier consumes.
std::vector<double> gptzero_features(const TextSample& sample, const LmScorer& scorer);

// Logistic regression over standardized features.
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;   // always > 0
  std::vector<std::string> feature_names;

  std::vector<double> standardize(const std::vector<double>& raw) const;
  // sigmoid(w . standardize(raw) + b)
  double predict(const std::vector<double>& raw) const;

  nlohmann::ordered_json to_json() const;
  static LogisticModel from_json(const nlohmann::ordered_json& j);
  void save(const std::string& path) const;
  static LogisticModel load(const std::string& path);
};

struct TrainOptions {
  double learning_rate = 0.1;
  int max_iters = 5000;
  double tolerance = 1e-7;  // stop when the gradient infinity-norm drops below
  std::vector<std::string> feature_names;
};

// Full-batch gradient descent on mean cross-entropy, zero-initialized, over
// features standardized with training-set mean/std. Deterministic.
LogisticModel train_logistic(const std::vector<std::vector<double>>& features,
                             const std::vector<int>& labels, const TrainOptions& options = {});

DetectorVerdict classify(const LogisticModel& model, const std::vector<double>& features,
                         double threshold = 0.5);

// Exposed for gradient checking: mean cross-entropy and its gradient over
// already-standardized features.
double logistic_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& weights, double bias);
void logistic_gradient(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       std::vector<double>& grad_weights, double& grad_bias);

}  // namespace stylometer

#endif  // STYLOMETER_DETECTORS_HPP
