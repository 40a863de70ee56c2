#ifndef STYLOMETER_REPORT_HPP
#define STYLOMETER_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylometer/results_store.hpp"
#include "stylometer/statistics.hpp"

namespace stylometer {

struct ReportCell {
  std::string group;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;
};

struct ReportRow {
  std::string task;
  std::string metric;
  std::vector<ReportCell> cells;      // group order matches ReportTable::groups
  std::vector<PairwiseTest> tests;    // two-sided, all group pairs
  std::optional<std::string> note;    // set when the metric is missing somewhere
};

// Mean (SD) per group and pairwise test cells, grouped by task then metric.
// Human/source samples join every task block as their own group, mirroring
// the repeated "Original" column of the summary table.
struct ReportTable {
  std::vector<std::string> groups;
  std::vector<ReportRow> rows;
};

ReportTable build_report(const std::vector<ResultsRecord>& records,
                         const MannWhitneyOptions& options = {});

std::string render_text(const ReportTable& table);
nlohmann::ordered_json render_json(const ReportTable& table);

// Tukey box statistics with linear-interpolation ("type 7") quartiles;
// whiskers at 1.5*IQR clamped to data extrema.
struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

// Linear-interpolation quantile over sorted values, p in [0,1].
double quantile_type7(const std::vector<double>& sorted_values, double p);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

// Standalone SVG, deterministic bytes for fixed input.
std::string render_boxplot_svg(const std::string& title, const std::string& value_label,
                               const std::vector<BoxGroup>& groups);

// One SVG per (task, metric) under out_dir, named "<task>_<metric>.svg".
// Returns the written paths. Throws EmptyResults when nothing is plottable.
std::vector<std::string> emit_boxplots(const std::vector<ResultsRecord>& records,
                                       const std::string& out_dir);

// Detection over stored results.
struct ConfusionCounts {
  std::size_t total = 0;
  std::size_t labeled_ai = 0;
  std::size_t labeled_human = 0;
};

// detector name -> origin -> counts. The false-negative rate of an AI origin
// is labeled_human / total; the false-positive rate of the human origin is
// labeled_ai / total.
using DetectorConfusion = std::map<std::string, std::map<std::string, ConfusionCounts>>;

struct DetectOutcome {
  std::vector<ResultsRecord> records;  // verdicts replaced by fresh ones
  DetectorConfusion confusion;
  std::vector<std::string> skipped;  // sample ids without usable features/scores
};

// Applies the configured detectors to stored results: the logistic model
// over its named metric features when supplied, and re-thresholded
// perturbation-discrepancy scores for records that carry them.
DetectOutcome run_detection(const std::vector<ResultsRecord>& results,
                            const DetectorConfig& config,
                            const std::optional<LogisticModel>& model,
                            std::optional<double> threshold_override = std::nullopt);

std::string render_confusion_text(const DetectorConfusion& confusion);
nlohmann::ordered_json render_confusion_json(const DetectorConfusion& confusion);

}  // namespace stylometer

#endif  // STYLOMETER_REPORT_HPP
