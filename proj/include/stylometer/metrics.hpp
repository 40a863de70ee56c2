#ifndef STYLOMETER_METRICS_HPP
#define STYLOMETER_METRICS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylometer/corpus.hpp"
#include "stylometer/lm_scoring.hpp"
#include "stylometer/segmentation.hpp"

namespace stylometer {

// Sentence embedding capability. Output dimension is constant per instance
// and identical text embeds identically.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view sentence) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Deterministic offline embedder: hashed bag-of-words counts over word
// tokens, L2-normalized. Not a semantic model; it exists so coherence has a
// reproducible offline backend.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimension = 64);
  std::vector<double> embed(std::string_view sentence) const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
};

// Grammar-check capability: true when the sentence is flagged as containing
// at least one error. Deterministic per sentence text.
class GrammarChecker {
 public:
  virtual ~GrammarChecker() = default;
  virtual bool check(std::string_view sentence) const = 0;
};

// Offline rule checker: doubled words, sentence not starting with a capital,
// unmatched brackets.
class RuleGrammarChecker final : public GrammarChecker {
 public:
  bool check(std::string_view sentence) const override;
};

// Per-sample metric values. A field is either present or recorded in
// `absent` with a reason code; absent is never encoded as zero.
struct MetricVector {
  std::optional<double> perplexity;
  std::optional<double> mean_sentence_pp;    // feeds the perplexity/burstiness classifier
  std::optional<double> burstiness_pp_var;   // variance of sentence perplexities
  std::optional<double> burstiness_len_cv;   // std/mean of sentence lengths
  std::optional<double> ttr;
  std::optional<double> grammar_error_rate;
  std::optional<double> semantic_coherence;
  std::optional<double> bleu;
  std::optional<double> rouge1_f1;
  std::optional<double> rouge2_f1;
  std::optional<double> rougeL_f1;
  std::map<std::string, std::string> absent;  // field name -> reason code

  static const std::vector<std::string>& field_names();
  std::optional<double> get(std::string_view field) const;
  void set(std::string_view field, double value);
  void mark_absent(std::string_view field, std::string reason);

  bool operator==(const MetricVector& other) const = default;
};

// Population variance of sentence-level perplexities. Needs >= 2 sentences.
double burstiness_pp_var(const std::vector<double>& sentence_pps);

// Population std of per-sentence token counts divided by their mean.
double burstiness_len_cv(const SentenceList& sentences);
double burstiness_len_cv(const std::vector<std::size_t>& sentence_lengths);

// Distinct-token count over total token count.
double ttr(const TokenSequence& tokens);

// Fraction of sentences the checker flags.
double grammar_error_rate(const SentenceList& sentences, const GrammarChecker& checker);

// Mean cosine similarity over adjacent sentence-embedding pairs.
double semantic_coherence(const SentenceList& sentences, const Embedder& embedder);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Computes every metric the sample supports; overlap metrics only when a
// reference text exists; fields whose preconditions fail are marked absent
// with the corresponding reason code.
MetricVector compute_metric_vector(const TextSample& sample, const LmScorer& scorer,
                                   const Embedder& embedder, const GrammarChecker& checker);

}  // namespace stylometer

#endif  // STYLOMETER_METRICS_HPP
