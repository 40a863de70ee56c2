#ifndef STYLOMETER_OVERLAP_HPP
#define STYLOMETER_OVERLAP_HPP

#include <optional>
#include <string>

#include "stylometer/segmentation.hpp"

namespace stylometer {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // set when the score is degenerate (e.g. text shorter than n)
  std::optional<std::string> reason;
};

// Sentence-level BLEU: clipped n-gram precisions p_1..p_max_n combined with
// uniform weights, times brevity penalty min(1, exp(1 - r/c)). Any zero
// precision is replaced by epsilon = 1e-9 so single-sample scores avoid hard
// zeros. Throws EmptyInput when either side has no tokens.
double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_n = 4);

// ROUGE-N: clipped multiset n-gram overlap. recall = overlap / reference
// n-grams, precision = overlap / candidate n-grams.
RougeScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

// ROUGE-L: longest common subsequence over tokens. precision = LCS/|candidate|,
// recall = LCS/|reference|.
RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

}  // namespace stylometer

#endif  // STYLOMETER_OVERLAP_HPP
