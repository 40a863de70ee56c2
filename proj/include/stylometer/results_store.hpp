#ifndef STYLOMETER_RESULTS_STORE_HPP
#define STYLOMETER_RESULTS_STORE_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylometer/detectors.hpp"
#include "stylometer/metrics.hpp"

namespace stylometer {

// One analysis record per sample, append-only. Identical inputs and versions
// produce byte-identical records. A failed sample keeps its id and carries
// `error` instead of metrics.
struct ResultsRecord {
  std::string id;
  std::string origin;
  std::string task;
  std::optional<MetricVector> metrics;
  std::vector<DetectorVerdict> verdicts;
  std::optional<std::string> error;
  std::string version;
  std::string scorer;

  bool operator==(const ResultsRecord& other) const = default;
};

nlohmann::ordered_json record_to_json(const ResultsRecord& record);
ResultsRecord record_from_json(const nlohmann::ordered_json& j);

// Line-delimited JSON, fixed key order, UTF-8.
void save_results(const std::vector<ResultsRecord>& records, const std::string& path);
std::vector<ResultsRecord> load_results(const std::string& path);

}  // namespace stylometer

#endif  // STYLOMETER_RESULTS_STORE_HPP
