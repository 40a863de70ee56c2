#include "stylometer/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "stylometer/errors.hpp"
#include "stylometer/overlap.hpp"

namespace stylometer {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : s) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

double population_variance(const std::vector<double>& values) {
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  return var / static_cast<double>(values.size());
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error("EmptyInput", "embedder dimension must be positive");
}

std::vector<double> HashEmbedder::embed(std::string_view sentence) const {
  std::vector<double> vec(dimension_, 0.0);
  for (const Token& t : tokenize(sentence).tokens) {
    vec[fnv1a(t.text) % dimension_] += 1.0;
  }
  double norm = 0.0;
  for (const double v : vec) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : vec) v /= norm;
  }
  return vec;
}

bool RuleGrammarChecker::check(std::string_view sentence) const {
  // rule 1: doubled word ("the the")
  const TokenSequence tokens = tokenize(sentence);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens.tokens[i].text == tokens.tokens[i - 1].text) return true;
  }
  // rule 2: first character of the raw span is a lowercase letter
  for (const char c : sentence) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c >= 'a' && c <= 'z') return true;
    break;
  }
  // rule 3: unmatched brackets
  std::vector<char> stack;
  for (const char c : sentence) {
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
      if (stack.empty() || stack.back() != open) return true;
      stack.pop_back();
    }
  }
  return !stack.empty();
}

const std::vector<std::string>& MetricVector::field_names() {
  static const std::vector<std::string> names = {
      "perplexity",         "mean_sentence_pp", "burstiness_pp_var", "burstiness_len_cv",
      "ttr",                "grammar_error_rate", "semantic_coherence", "bleu",
      "rouge1_f1",          "rouge2_f1",        "rougeL_f1"};
  return names;
}

std::optional<double> MetricVector::get(std::string_view field) const {
  if (field == "perplexity") return perplexity;
  if (field == "mean_sentence_pp") return mean_sentence_pp;
  if (field == "burstiness_pp_var") return burstiness_pp_var;
  if (field == "burstiness_len_cv") return burstiness_len_cv;
  if (field == "ttr") return ttr;
  if (field == "grammar_error_rate") return grammar_error_rate;
  if (field == "semantic_coherence") return semantic_coherence;
  if (field == "bleu") return bleu;
  if (field == "rouge1_f1") return rouge1_f1;
  if (field == "rouge2_f1") return rouge2_f1;
  if (field == "rougeL_f1") return rougeL_f1;
  return std::nullopt;
}

void MetricVector::set(std::string_view field, double value) {
  if (field == "perplexity") perplexity = value;
  else if (field == "mean_sentence_pp") mean_sentence_pp = value;
  else if (field == "burstiness_pp_var") burstiness_pp_var = value;
  else if (field == "burstiness_len_cv") burstiness_len_cv = value;
  else if (field == "ttr") ttr = value;
  else if (field == "grammar_error_rate") grammar_error_rate = value;
  else if (field == "semantic_coherence") semantic_coherence = value;
  else if (field == "bleu") bleu = value;
  else if (field == "rouge1_f1") rouge1_f1 = value;
  else if (field == "rouge2_f1") rouge2_f1 = value;
  else if (field == "rougeL_f1") rougeL_f1 = value;
  else throw Error("SchemaViolation", "unknown metric field \"" + std::string(field) + "\"");
}

void MetricVector::mark_absent(std::string_view field, std::string reason) {
  absent[std::string(field)] = std::move(reason);
}

double burstiness_pp_var(const std::vector<double>& sentence_pps) {
  if (sentence_pps.size() < 2) {
    throw Error("TooFewSentences", "perplexity variance needs at least 2 sentences");
  }
  return population_variance(sentence_pps);
}

double burstiness_len_cv(const std::vector<std::size_t>& sentence_lengths) {
  if (sentence_lengths.size() < 2) {
    throw Error("TooFewSentences", "length CV needs at least 2 sentences");
  }
  std::vector<double> lengths;
  lengths.reserve(sentence_lengths.size());
  double total = 0.0;
  for (const std::size_t n : sentence_lengths) {
    lengths.push_back(static_cast<double>(n));
    total += static_cast<double>(n);
  }
  if (total <= 0.0) throw Error("EmptyInput", "length CV needs a nonzero total token count");
  const double mean = total / static_cast<double>(lengths.size());
  return std::sqrt(population_variance(lengths)) / mean;
}

double burstiness_len_cv(const SentenceList& sentences) {
  std::vector<std::size_t> lengths;
  lengths.reserve(sentences.size());
  for (const Sentence& s : sentences.sentences) lengths.push_back(s.tokens.size());
  return burstiness_len_cv(lengths);
}

double ttr(const TokenSequence& tokens) {
  if (tokens.empty()) throw Error("EmptyInput", "type-token ratio needs at least 1 token");
  std::unordered_set<std::string> types;
  for (const Token& t : tokens.tokens) types.insert(t.text);
  return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

double grammar_error_rate(const SentenceList& sentences, const GrammarChecker& checker) {
  if (sentences.empty()) throw Error("EmptyInput", "grammar-error rate needs sentences");
  std::size_t flagged = 0;
  for (const Sentence& s : sentences.sentences) {
    if (checker.check(s.text)) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(sentences.size());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("DimensionMismatch", "embedding dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) throw Error("ZeroVector", "cosine of a zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double semantic_coherence(const SentenceList& sentences, const Embedder& embedder) {
  if (sentences.size() < 2) {
    throw Error("TooFewSentences", "coherence needs at least 2 sentences");
  }
  std::vector<std::vector<double>> embeddings;
  embeddings.reserve(sentences.size());
  for (const Sentence& s : sentences.sentences) embeddings.push_back(embedder.embed(s.text));

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < embeddings.size(); ++i) {
    sum += cosine_similarity(embeddings[i], embeddings[i + 1]);
  }
  return sum / static_cast<double>(embeddings.size() - 1);
}

MetricVector compute_metric_vector(const TextSample& sample, const LmScorer& scorer,
                                   const Embedder& embedder, const GrammarChecker& checker) {
  if (sample.text.empty()) throw Error("EmptyInput", "sample \"" + sample.id + "\" has no text");
  const TokenSequence tokens = tokenize(sample.text);
  if (tokens.empty()) {
    throw Error("EmptyInput", "sample \"" + sample.id + "\" has no word tokens");
  }
  const SentenceList sentences = split_sentences(sample.text);

  MetricVector mv;
  mv.ttr = ttr(tokens);

  // the scorer is the primary capability: endpoint failures fail the sample
  const PerplexityResult pp = sentence_perplexities(scorer, sentences);
  mv.perplexity = pp.document_pp;
  double mean_pp = 0.0;
  for (const double v : pp.sentence_pps) mean_pp += v;
  mv.mean_sentence_pp = mean_pp / static_cast<double>(pp.sentence_pps.size());
  if (pp.sentence_pps.size() >= 2) {
    mv.burstiness_pp_var = burstiness_pp_var(pp.sentence_pps);
  } else {
    mv.mark_absent("burstiness_pp_var", "TooFewSentences");
  }

  if (sentences.size() >= 2) {
    mv.burstiness_len_cv = burstiness_len_cv(sentences);
  } else {
    mv.mark_absent("burstiness_len_cv", "TooFewSentences");
  }

  try {
    mv.grammar_error_rate = grammar_error_rate(sentences, checker);
  } catch (const Error& e) {
    mv.mark_absent("grammar_error_rate", e.code());
  }

  if (sentences.size() >= 2) {
    try {
      mv.semantic_coherence = semantic_coherence(sentences, embedder);
    } catch (const Error& e) {
      mv.mark_absent("semantic_coherence", e.code());
    }
  } else {
    mv.mark_absent("semantic_coherence", "TooFewSentences");
  }

  if (sample.reference) {
    try {
      const TokenSequence reference = tokenize(*sample.reference);
      mv.bleu = bleu(tokens, reference);
      mv.rouge1_f1 = rouge_n(tokens, reference, 1).f1;
      mv.rouge2_f1 = rouge_n(tokens, reference, 2).f1;
      mv.rougeL_f1 = rouge_l(tokens, reference).f1;
    } catch (const Error& e) {
      mv.mark_absent("bleu", e.code());
      mv.mark_absent("rouge1_f1", e.code());
      mv.mark_absent("rouge2_f1", e.code());
      mv.mark_absent("rougeL_f1", e.code());
    }
  } else {
    mv.mark_absent("bleu", "NoReference");
    mv.mark_absent("rouge1_f1", "NoReference");
    mv.mark_absent("rouge2_f1", "NoReference");
    mv.mark_absent("rougeL_f1", "NoReference");
  }
  return mv;
}

}  // namespace stylometer
