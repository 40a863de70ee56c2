#include "stylometer/lm_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stylometer/errors.hpp"

namespace stylometer {

namespace {
constexpr char kKeySep = '\x1f';
}

ScoredText TokenLmScorer::score_text(std::string_view text) const {
  ScoredText out;
  out.tokens = tokenize(text).texts();
  out.logprobs = score_tokens(out.tokens);
  return out;
}

UniformScorer::UniformScorer(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size == 0) throw Error("EmptyInput", "uniform scorer needs a nonzero vocabulary");
  logprob_ = -std::log(static_cast<double>(vocab_size));
}

std::vector<double> UniformScorer::score_tokens(const std::vector<std::string>& tokens) const {
  return std::vector<double>(tokens.size(), logprob_);
}

std::string UniformScorer::id() const {
  return "uniform:V=" + std::to_string(vocab_size_);
}

std::string NGramModel::context_key(const std::vector<std::string>& context) const {
  std::string key;
  for (const std::string& c : context) {
    key += c;
    key += kKeySep;
  }
  return key;
}

const std::string& NGramModel::map_token(const std::string& token) const {
  static const std::string unk = kUnk;
  if (token == kBos) return token;
  auto it = in_vocab_.find(token);
  return it != in_vocab_.end() ? token : unk;
}

double NGramModel::prob(const std::vector<std::string>& context, const std::string& token) const {
  const std::size_t want = order_ - 1;
  const std::size_t have = std::min(context.size(), want);
  std::vector<std::string> ctx;
  ctx.reserve(want);
  for (std::size_t i = 0; i < want - have; ++i) ctx.emplace_back(kBos);
  for (std::size_t i = context.size() - have; i < context.size(); ++i) {
    ctx.push_back(map_token(context[i]));
  }

  const std::string key = context_key(ctx);
  const double v = static_cast<double>(vocab_size());
  std::size_t count = 0;
  std::size_t total = 0;
  if (auto it = counts_.find(key); it != counts_.end()) {
    total = it->second.total;
    if (auto jt = it->second.token_counts.find(map_token(token)); jt != it->second.token_counts.end()) {
      count = jt->second;
    }
  }
  return (static_cast<double>(count) + smoothing_) / (static_cast<double>(total) + smoothing_ * v);
}

std::vector<double> NGramModel::score_tokens(const std::vector<std::string>& tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<std::string> context(order_ - 1, kBos);
  for (const std::string& token : tokens) {
    out.push_back(std::log(prob(context, token)));
    if (order_ > 1) {
      context.erase(context.begin());
      context.push_back(map_token(token));
    }
  }
  return out;
}

std::string NGramModel::id() const {
  std::ostringstream os;
  os << "ngram:n=" << order_ << ",k=" << smoothing_;
  return os.str();
}

NGramModel train_ngram(const std::vector<TokenSequence>& corpus, std::size_t order,
                       double smoothing) {
  if (corpus.empty()) throw Error("EmptyCorpus", "n-gram training corpus is empty");
  if (order < 1) throw Error("EmptyInput", "n-gram order must be >= 1");
  if (!(smoothing > 0.0)) throw Error("EmptyInput", "add-k constant must be > 0");

  NGramModel model;
  model.order_ = order;
  model.smoothing_ = smoothing;

  for (const TokenSequence& doc : corpus) {
    for (const Token& t : doc.tokens) {
      if (model.in_vocab_.emplace(t.text, true).second) model.vocabulary_.push_back(t.text);
    }
  }
  model.vocabulary_.push_back(NGramModel::kUnk);
  model.in_vocab_.emplace(NGramModel::kUnk, true);

  for (const TokenSequence& doc : corpus) {
    std::vector<std::string> context(order - 1, NGramModel::kBos);
    for (const Token& t : doc.tokens) {
      const std::string key = model.context_key(context);
      auto& bucket = model.counts_[key];
      ++bucket.token_counts[t.text];
      ++bucket.total;
      if (order > 1) {
        context.erase(context.begin());
        context.push_back(t.text);
      }
    }
  }
  return model;
}

double perplexity(const std::vector<double>& logprobs) {
  if (logprobs.empty()) throw Error("EmptyInput", "perplexity of zero tokens is undefined");
  double sum = 0.0;
  for (double lp : logprobs) sum += lp;
  return std::exp(-sum / static_cast<double>(logprobs.size()));
}

double perplexity(const TokenLmScorer& scorer, const TokenSequence& tokens) {
  if (tokens.empty()) throw Error("EmptyInput", "perplexity of zero tokens is undefined");
  return perplexity(scorer.score_tokens(tokens.texts()));
}

double perplexity_text(const LmScorer& scorer, std::string_view text) {
  const ScoredText scored = scorer.score_text(text);
  if (scored.logprobs.empty()) throw Error("EmptyInput", "scorer returned no tokens");
  return perplexity(scored.logprobs);
}

PerplexityResult sentence_perplexities(const LmScorer& scorer, const SentenceList& sentences) {
  if (sentences.empty()) throw Error("EmptyInput", "no sentences to score");
  PerplexityResult result;
  result.sentence_pps.reserve(sentences.size());
  for (const Sentence& s : sentences.sentences) {
    result.sentence_pps.push_back(perplexity_text(scorer, s.text));
  }
  result.document_pp = perplexity_text(scorer, sentences.source);
  return result;
}

PerplexityResult sentence_perplexities(const TokenLmScorer& scorer, const SentenceList& sentences,
                                       SentenceScoring mode) {
  if (mode == SentenceScoring::ContextFree) {
    return sentence_perplexities(static_cast<const LmScorer&>(scorer), sentences);
  }
  if (sentences.empty()) throw Error("EmptyInput", "no sentences to score");

  std::vector<std::string> document;
  std::vector<std::size_t> boundaries;  // token count per sentence
  for (const Sentence& s : sentences.sentences) {
    boundaries.push_back(s.tokens.size());
    for (const Token& t : s.tokens.tokens) document.push_back(t.text);
  }
  const std::vector<double> logprobs = scorer.score_tokens(document);

  PerplexityResult result;
  std::size_t offset = 0;
  for (const std::size_t count : boundaries) {
    if (count == 0) throw Error("EmptyInput", "sentence without tokens");
    const std::vector<double> slice(logprobs.begin() + static_cast<std::ptrdiff_t>(offset),
                                    logprobs.begin() + static_cast<std::ptrdiff_t>(offset + count));
    result.sentence_pps.push_back(perplexity(slice));
    offset += count;
  }
  result.document_pp = perplexity(logprobs);
  return result;
}

}  // namespace stylometer
