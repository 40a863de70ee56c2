#include "stylometer/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

// Midranks of the pooled sample; a-values first, b-values after.
std::vector<double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&pooled](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool has_ties(const std::vector<double>& pooled) {
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) return true;
  }
  return false;
}

// P(U1 <= u) under the null, by full enumeration of C(n, n1) placements of
// group-1 ranks. Tie-free groups only; ranks are 1..n.
double exact_lower_tail(std::size_t n1, std::size_t n2, double u) {
  const std::size_t n = n1 + n2;
  std::vector<std::size_t> comb(n1);
  for (std::size_t i = 0; i < n1; ++i) comb[i] = i;  // positions 0-based; rank = pos + 1

  const double offset = static_cast<double>(n1 * (n1 + 1)) / 2.0;
  std::size_t total = 0;
  std::size_t hits = 0;
  while (true) {
    double rank_sum = 0.0;
    for (const std::size_t pos : comb) rank_sum += static_cast<double>(pos + 1);
    ++total;
    if (rank_sum - offset <= u + 1e-9) ++hits;

    // next lexicographic combination
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n1) - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] ==
                         n - n1 + static_cast<std::size_t>(i)) {
      --i;
    }
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (std::size_t k = static_cast<std::size_t>(i) + 1; k < n1; ++k) {
      comb[k] = comb[k - 1] + 1;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double normal_sf(double z) {
  // 1 - Phi(z)
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

GroupSummary descriptive(const std::vector<double>& values) {
  if (values.empty()) throw Error("EmptyInput", "descriptive statistics need at least one value");
  GroupSummary summary;
  summary.n = values.size();
  double sum = 0.0;
  for (const double v : values) sum += v;
  summary.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - summary.mean) * (v - summary.mean);
    summary.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return summary;
}

StatTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                              bool two_sided, const MannWhitneyOptions& options) {
  if (a.empty() || b.empty()) throw Error("EmptyInput", "both groups must be non-empty");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum_a += ranks[i];
  const double u1 = rank_sum_a - static_cast<double>(n1 * (n1 + 1)) / 2.0;
  const double u2 = static_cast<double>(n1) * static_cast<double>(n2) - u1;
  const double u_min = std::min(u1, u2);

  StatTestResult result;
  result.n1 = n1;
  result.n2 = n2;
  result.two_sided = two_sided;
  result.u_statistic = u_min;

  const bool tie_free = !has_ties(pooled);
  if (n1 <= options.exact_cap && n2 <= options.exact_cap && tie_free) {
    result.method = "exact";
    if (two_sided) {
      result.p_value = std::min(1.0, 2.0 * exact_lower_tail(n1, n2, u_min));
    } else {
      result.p_value = exact_lower_tail(n1, n2, u1);
    }
    return result;
  }

  result.method = "normal_approx";
  const double mean = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;

  // tie-corrected variance
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double nn = static_cast<double>(n);
  const double variance = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                          ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double sd = std::sqrt(variance);
  if (two_sided) {
    const double z = std::max(0.0, std::abs(u_min - mean) - 0.5) / sd;
    result.p_value = std::min(1.0, 2.0 * normal_sf(z));
  } else {
    const double z = (u1 - mean + 0.5) / sd;
    result.p_value = 1.0 - normal_sf(z);  // P(U <= u1), continuity-corrected
  }
  return result;
}

CompareResult compare_groups(const std::map<std::string, std::vector<MetricVector>>& groups,
                             const MannWhitneyOptions& options) {
  if (groups.size() < 2) {
    throw Error("InsufficientGroups", "group comparison needs at least 2 groups");
  }
  for (const auto& [name, vectors] : groups) {
    if (vectors.empty()) throw Error("InsufficientGroups", "group \"" + name + "\" is empty");
  }

  CompareResult result;
  for (const std::string& metric : MetricVector::field_names()) {
    std::map<std::string, std::vector<double>> values;
    std::string missing_group;
    for (const auto& [name, vectors] : groups) {
      std::vector<double>& list = values[name];
      for (const MetricVector& mv : vectors) {
        if (const auto v = mv.get(metric)) list.push_back(*v);
      }
      if (list.empty() && missing_group.empty()) missing_group = name;
    }
    if (!missing_group.empty()) {
      result.skipped[metric] = "absent in group \"" + missing_group + "\"";
      continue;
    }

    MetricComparison comparison;
    comparison.metric = metric;
    for (const auto& [name, list] : values) {
      GroupSummary summary = descriptive(list);
      summary.metric = metric;
      summary.group = name;
      comparison.summaries.push_back(std::move(summary));
    }
    for (auto it = values.begin(); it != values.end(); ++it) {
      for (auto jt = std::next(it); jt != values.end(); ++jt) {
        PairwiseTest pair;
        pair.group_a = it->first;
        pair.group_b = jt->first;
        pair.test = mann_whitney_u(it->second, jt->second, /*two_sided=*/true, options);
        comparison.pairwise.push_back(std::move(pair));
      }
    }
    result.metrics.push_back(std::move(comparison));
  }
  return result;
}

std::string format_significance(double p) {
  if (p < 0.001) return "p<0.001";
  if (p >= 0.05) return "n.s.";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "p=%.3f", p);
  return buf;
}

}  // namespace stylometer
