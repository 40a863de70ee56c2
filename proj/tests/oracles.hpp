// Independent reference implementations used by the unit and acceptance
// suites. These deliberately take different routes from the library code:
// string-joined n-grams with sorted-vector intersection instead of map
// clipping, a full LCS table instead of rolling rows, and pair-counting U
// with recursive subset enumeration instead of rank sums over combinations.

#ifndef STYLOMETER_TESTS_ORACLES_HPP
#define STYLOMETER_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline std::vector<std::string> joined_ngrams(const std::vector<std::string>& tokens,
                                              std::size_t n) {
  std::vector<std::string> grams;
  if (tokens.size() < n) return grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string g;
    for (std::size_t k = 0; k < n; ++k) {
      g += tokens[i + k];
      g += '\x1e';
    }
    grams.push_back(std::move(g));
  }
  std::sort(grams.begin(), grams.end());
  return grams;
}

inline std::size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::size_t overlap = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++overlap;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return overlap;
}

inline double bleu(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int max_n) {
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto cg = joined_ngrams(cand, static_cast<std::size_t>(n));
    const auto rg = joined_ngrams(ref, static_cast<std::size_t>(n));
    double p = cg.empty() ? 0.0
                          : static_cast<double>(multiset_overlap(cg, rg)) /
                                static_cast<double>(cg.size());
    if (p <= 0.0) p = 1e-9;
    log_sum += std::log(p) / static_cast<double>(max_n);
  }
  const double bp =
      std::min(1.0, std::exp(1.0 - static_cast<double>(ref.size()) /
                                       static_cast<double>(cand.size())));
  return std::exp(log_sum) * bp;
}

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf prf_from(double overlap, double cand_total, double ref_total) {
  Prf out;
  if (cand_total > 0.0) out.precision = overlap / cand_total;
  if (ref_total > 0.0) out.recall = overlap / ref_total;
  if (out.precision > 0.0 && out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

inline Prf rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int n) {
  const auto cg = joined_ngrams(cand, static_cast<std::size_t>(n));
  const auto rg = joined_ngrams(ref, static_cast<std::size_t>(n));
  return prf_from(static_cast<double>(multiset_overlap(cg, rg)),
                  static_cast<double>(cg.size()), static_cast<double>(rg.size()));
}

inline std::size_t lcs_full_table(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> table(a.size() + 1,
                                              std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      table[i][j] = a[i - 1] == b[j - 1] ? table[i - 1][j - 1] + 1
                                         : std::max(table[i - 1][j], table[i][j - 1]);
    }
  }
  return table[a.size()][b.size()];
}

inline Prf rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  return prf_from(static_cast<double>(lcs_full_table(cand, ref)),
                  static_cast<double>(cand.size()), static_cast<double>(ref.size()));
}

// U statistic for group a by pair counting (ties count half).
inline double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (const double x : a) {
    for (const double y : b) {
      if (x > y) {
        u += 1.0;
      } else if (x == y) {
        u += 0.5;
      }
    }
  }
  return u;
}

namespace detail {
inline void enumerate_splits(const std::vector<double>& pooled, std::size_t n1, std::size_t start,
                             std::vector<double>& group_a, std::vector<std::size_t>& chosen,
                             double u_threshold, std::size_t& total, std::size_t& hits) {
  if (group_a.size() == n1) {
    std::vector<double> group_b;
    std::size_t next = 0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      if (next < chosen.size() && chosen[next] == i) {
        ++next;
      } else {
        group_b.push_back(pooled[i]);
      }
    }
    ++total;
    if (pair_count_u(group_a, group_b) <= u_threshold + 1e-9) ++hits;
    return;
  }
  for (std::size_t i = start; i < pooled.size(); ++i) {
    group_a.push_back(pooled[i]);
    chosen.push_back(i);
    enumerate_splits(pooled, n1, i + 1, group_a, chosen, u_threshold, total, hits);
    group_a.pop_back();
    chosen.pop_back();
  }
}
}  // namespace detail

// Exact two-sided p for tie-free groups: 2 * P(U1 <= min(U1, U2)), capped at 1.
inline double mw_exact_two_sided_p(const std::vector<double>& a, const std::vector<double>& b) {
  const double u1 = pair_count_u(a, b);
  const double u2 = pair_count_u(b, a);
  const double u_min = std::min(u1, u2);

  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> group_a;
  std::vector<std::size_t> chosen;
  std::size_t total = 0;
  std::size_t hits = 0;
  detail::enumerate_splits(pooled, a.size(), 0, group_a, chosen, u_min, total, hits);
  return std::min(1.0, 2.0 * static_cast<double>(hits) / static_cast<double>(total));
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t length,
                                              std::size_t vocab) {
  static const char* words[] = {"alpha", "beta",  "gamma", "delta", "omega", "sigma",
                                "theta", "kappa", "zeta",  "iota",  "mu",    "nu"};
  std::vector<std::string> out;
  out.reserve(length);
  const std::size_t v = std::min(vocab, sizeof(words) / sizeof(words[0]));
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(words[rng() % v]);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace oracle

#endif  // STYLOMETER_TESTS_ORACLES_HPP
