#ifndef STYLOMETER_STATISTICS_HPP
#define STYLOMETER_STATISTICS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylometer/metrics.hpp"

namespace stylometer {

struct GroupSummary {
  std::string metric;
  std::string group;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample SD (n-1); absent for n == 1
};

struct StatTestResult {
  double u_statistic = 0.0;  // min(U1, U2)
  double p_value = 1.0;
  std::string method;        // "exact" or "normal_approx"
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool two_sided = true;
};

struct MannWhitneyOptions {
  // Exact enumeration is used iff both group sizes are within this cap and
  // the pooled values are tie-free.
  std::size_t exact_cap = 10;
};

// Arithmetic mean plus sample standard deviation (n-1 denominator).
GroupSummary descriptive(const std::vector<double>& values);

// Rank-sum U with midranks for ties. Exact p by full enumeration of
// C(n1+n2, n1) rank placements when within caps and tie-free; otherwise the
// normal approximation with tie-corrected variance and continuity correction.
StatTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                              bool two_sided = true, const MannWhitneyOptions& options = {});

struct PairwiseTest {
  std::string group_a;
  std::string group_b;
  StatTestResult test;
};

struct MetricComparison {
  std::string metric;
  std::vector<GroupSummary> summaries;  // one per group, group-name order
  std::vector<PairwiseTest> pairwise;   // all unordered group pairs
};

struct CompareResult {
  std::vector<MetricComparison> metrics;
  std::map<std::string, std::string> skipped;  // metric -> reason
};

// Pairwise two-sided tests plus summaries for every metric present in all
// groups; metrics missing from some group are skipped with a reason.
CompareResult compare_groups(const std::map<std::string, std::vector<MetricVector>>& groups,
                             const MannWhitneyOptions& options = {});

// Table-style significance formatting: "p<0.001", "p=0.012", or "n.s."
// (p >= 0.05).
std::string format_significance(double p);

}  // namespace stylometer

#endif  // STYLOMETER_STATISTICS_HPP
