#ifndef STYLOMETER_HTTP_CLIENTS_HPP
#define STYLOMETER_HTTP_CLIENTS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "stylometer/lm_scoring.hpp"
#include "stylometer/metrics.hpp"

namespace stylometer {

// External LM scorer speaking the wire protocol:
//   POST /score  {"text": "<raw text>"}
//   -> {"tokens": ["..."], "logprobs": [negative reals]}
// Log probabilities are natural-log, one per scorer token, first token scored
// from begin-of-text. Perplexity is computed over the scorer's own tokens.
class HttpScorer final : public LmScorer {
 public:
  explicit HttpScorer(std::string base_url, int timeout_seconds = 120);
  ScoredText score_text(std::string_view text) const override;
  std::string id() const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

// External sentence embedder:
//   POST /embed  {"texts": ["..."]}  ->  {"vectors": [[..], ..]}
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(std::string base_url, int timeout_seconds = 60);
  std::vector<double> embed(std::string_view sentence) const override;
  std::size_t dimension() const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
  mutable std::size_t dimension_ = 0;  // learned from the first response
};

// LanguageTool-compatible checker:
//   POST /v2/check  (form fields text, language=en-US)  ->  {"matches": [..]}
// A sentence is flagged iff at least one match is reported for it.
class HttpGrammarChecker final : public GrammarChecker {
 public:
  explicit HttpGrammarChecker(std::string base_url, std::string language = "en-US",
                              int timeout_seconds = 60);
  bool check(std::string_view sentence) const override;

 private:
  std::string base_url_;
  std::string language_;
  int timeout_seconds_;
};

// Prefixes "http://" when no scheme is present.
std::string normalize_base_url(std::string_view url);

}  // namespace stylometer

#endif  // STYLOMETER_HTTP_CLIENTS_HPP
