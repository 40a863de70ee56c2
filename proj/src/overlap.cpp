#include "stylometer/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

constexpr double kBleuEpsilon = 1e-9;

using NGramCounts = std::map<std::vector<std::string>, std::size_t>;

NGramCounts ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  NGramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(gram)];
  }
  return counts;
}

std::size_t clipped_overlap(const NGramCounts& candidate, const NGramCounts& reference) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : candidate) {
    if (auto it = reference.find(gram); it != reference.end()) {
      overlap += std::min(count, it->second);
    }
  }
  return overlap;
}

double f1(double precision, double recall) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_n) {
  if (candidate.empty() || reference.empty()) {
    throw Error("EmptyInput", "BLEU needs non-empty candidate and reference");
  }
  if (max_n < 1 || max_n > 4) throw Error("EmptyInput", "BLEU max_n must be in [1,4]");

  const std::vector<std::string> cand = candidate.texts();
  const std::vector<std::string> ref = reference.texts();

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const NGramCounts cand_counts = ngram_counts(cand, static_cast<std::size_t>(n));
    const NGramCounts ref_counts = ngram_counts(ref, static_cast<std::size_t>(n));
    std::size_t total = 0;
    for (const auto& [gram, count] : cand_counts) {
      (void)gram;
      total += count;
    }
    double precision = 0.0;
    if (total > 0) {
      precision = static_cast<double>(clipped_overlap(cand_counts, ref_counts)) /
                  static_cast<double>(total);
    }
    if (precision <= 0.0) precision = kBleuEpsilon;
    log_sum += std::log(precision) / static_cast<double>(max_n);
  }

  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = std::min(1.0, std::exp(1.0 - r / c));
  return std::exp(log_sum) * brevity;
}

RougeScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n) {
  if (candidate.empty() || reference.empty()) {
    throw Error("EmptyInput", "ROUGE needs non-empty candidate and reference");
  }
  if (n < 1) throw Error("EmptyInput", "ROUGE-N needs n >= 1");

  RougeScore score;
  const auto un = static_cast<std::size_t>(n);
  if (candidate.size() < un || reference.size() < un) {
    score.reason = "DegenerateN";
    return score;
  }
  const NGramCounts cand_counts = ngram_counts(candidate.texts(), un);
  const NGramCounts ref_counts = ngram_counts(reference.texts(), un);
  const auto overlap = static_cast<double>(clipped_overlap(cand_counts, ref_counts));

  score.precision = overlap / static_cast<double>(candidate.size() - un + 1);
  score.recall = overlap / static_cast<double>(reference.size() - un + 1);
  score.f1 = f1(score.precision, score.recall);
  return score;
}

RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) {
    throw Error("EmptyInput", "ROUGE needs non-empty candidate and reference");
  }
  const std::vector<std::string> cand = candidate.texts();
  const std::vector<std::string> ref = reference.texts();

  // Standard LCS dynamic program, rolling rows.
  std::vector<std::size_t> prev(ref.size() + 1, 0);
  std::vector<std::size_t> curr(ref.size() + 1, 0);
  for (std::size_t i = 1; i <= cand.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      if (cand[i - 1] == ref[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  const auto lcs = static_cast<double>(prev[ref.size()]);

  RougeScore score;
  score.precision = lcs / static_cast<double>(cand.size());
  score.recall = lcs / static_cast<double>(ref.size());
  score.f1 = f1(score.precision, score.recall);
  return score;
}

}  // namespace stylometer
