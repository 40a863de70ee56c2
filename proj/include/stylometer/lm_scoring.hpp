#ifndef STYLOMETER_LM_SCORING_HPP
#define STYLOMETER_LM_SCORING_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylometer/segmentation.hpp"

namespace stylometer {

// Raw-text scoring output. External scorers return their own (subword)
// tokens; built-in scorers return the shared word tokenization. Log
// probabilities are natural-log, one per token, first token scored from
// begin-of-text.
struct ScoredText {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
};

// Scoring capability over an autoregressive model: every log-probability is
// conditioned on the tokens before it.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  virtual ScoredText score_text(std::string_view text) const = 0;
  // Identifier recorded alongside results (e.g. "ngram:n=2,k=1").
  virtual std::string id() const = 0;
};

// Scorers that score caller-supplied word tokens directly. score_tokens
// returns exactly one log-probability (<= 0) per input token.
class TokenLmScorer : public LmScorer {
 public:
  virtual std::vector<double> score_tokens(const std::vector<std::string>& tokens) const = 0;
  ScoredText score_text(std::string_view text) const override;
};

// Assigns every token probability 1/V. Perplexity under this scorer equals V
// for any text, which several tests rely on.
class UniformScorer final : public TokenLmScorer {
 public:
  explicit UniformScorer(std::size_t vocab_size);
  std::vector<double> score_tokens(const std::vector<std::string>& tokens) const override;
  std::string id() const override;
  std::size_t vocab_size() const { return vocab_size_; }

 private:
  std::size_t vocab_size_;
  double logprob_;
};

// Add-k smoothed n-gram model, the deterministic reference scorer. Contexts
// are padded with a begin-of-text symbol; tokens outside the training
// vocabulary map to an unknown symbol that is part of the vocabulary.
class NGramModel final : public TokenLmScorer {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kUnk = "<unk>";

  std::size_t order() const { return order_; }
  double smoothing() const { return smoothing_; }
  std::size_t vocab_size() const { return vocabulary_.size(); }  // includes <unk>
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  // Add-k conditional probability; context is the up-to-(n-1) preceding
  // tokens, most recent last. Shorter contexts are BOS-padded.
  double prob(const std::vector<std::string>& context, const std::string& token) const;

  std::vector<double> score_tokens(const std::vector<std::string>& tokens) const override;
  std::string id() const override;

  friend NGramModel train_ngram(const std::vector<TokenSequence>& corpus, std::size_t order,
                                double smoothing);

 private:
  struct ContextCounts {
    std::unordered_map<std::string, std::size_t> token_counts;
    std::size_t total = 0;
  };

  std::string context_key(const std::vector<std::string>& context) const;
  const std::string& map_token(const std::string& token) const;

  std::size_t order_ = 1;
  double smoothing_ = 1.0;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, bool> in_vocab_;
  std::unordered_map<std::string, ContextCounts> counts_;
};

// Counts all order-n contexts over the corpus with begin-of-text padding.
// Throws EmptyCorpus for an empty corpus; order must be >= 1 and k > 0.
NGramModel train_ngram(const std::vector<TokenSequence>& corpus, std::size_t order,
                       double smoothing);

struct PerplexityResult {
  double document_pp = 0.0;
  std::vector<double> sentence_pps;  // aligned with the SentenceList
};

// exp(-mean(logprobs)); throws EmptyInput on an empty vector.
double perplexity(const std::vector<double>& logprobs);
double perplexity(const TokenLmScorer& scorer, const TokenSequence& tokens);
double perplexity_text(const LmScorer& scorer, std::string_view text);

// One perplexity per sentence, each scored independently from empty context;
// document perplexity over the full token stream.
PerplexityResult sentence_perplexities(const LmScorer& scorer, const SentenceList& sentences);

// Alternative sentence-scoring mode for token-level scorers. ContextFree
// matches the LmScorer overload; DocumentConditioned scores the document
// once and slices the per-token log-probabilities at sentence boundaries,
// so each sentence is conditioned on everything before it. External
// (subword) scorers cannot be sliced on word-sentence boundaries, hence the
// TokenLmScorer restriction.
enum class SentenceScoring { ContextFree, DocumentConditioned };

PerplexityResult sentence_perplexities(const TokenLmScorer& scorer, const SentenceList& sentences,
                                       SentenceScoring mode);

}  // namespace stylometer

#endif  // STYLOMETER_LM_SCORING_HPP
