#include "stylometer/results_store.hpp"

#include <fstream>

#include "stylometer/errors.hpp"

namespace stylometer {

nlohmann::ordered_json record_to_json(const ResultsRecord& record) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["origin"] = record.origin;
  j["task"] = record.task;
  if (record.error) {
    j["error"] = *record.error;
  } else if (record.metrics) {
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const std::string& field : MetricVector::field_names()) {
      if (const auto v = record.metrics->get(field)) metrics[field] = *v;
    }
    j["metrics"] = metrics;
    if (!record.metrics->absent.empty()) {
      nlohmann::ordered_json absent = nlohmann::ordered_json::object();
      for (const auto& [field, reason] : record.metrics->absent) absent[field] = reason;
      j["metrics_absent"] = absent;
    }
  }
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const DetectorVerdict& v : record.verdicts) verdicts.push_back(v.to_json());
  j["verdicts"] = verdicts;
  j["version"] = record.version;
  j["scorer"] = record.scorer;
  return j;
}

ResultsRecord record_from_json(const nlohmann::ordered_json& j) {
  ResultsRecord record;
  record.id = j.at("id").get<std::string>();
  record.origin = j.at("origin").get<std::string>();
  record.task = j.at("task").get<std::string>();
  if (j.contains("error")) {
    record.error = j.at("error").get<std::string>();
  } else if (j.contains("metrics")) {
    MetricVector mv;
    for (const auto& [field, value] : j.at("metrics").items()) {
      mv.set(field, value.get<double>());
    }
    if (j.contains("metrics_absent")) {
      for (const auto& [field, reason] : j.at("metrics_absent").items()) {
        mv.mark_absent(field, reason.get<std::string>());
      }
    }
    record.metrics = std::move(mv);
  } else {
    throw Error("SchemaViolation", "record has neither metrics nor error");
  }
  if (j.contains("verdicts")) {
    for (const auto& v : j.at("verdicts")) {
      record.verdicts.push_back(DetectorVerdict::from_json(v));
    }
  }
  record.version = j.value("version", "");
  record.scorer = j.value("scorer", "");
  return record;
}

void save_results(const std::vector<ResultsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write results file: " + path);
  for (const ResultsRecord& record : records) {
    out << record_to_json(record).dump() << '\n';
  }
  if (!out) throw Error("IoError", "short write to results file: " + path);
}

std::vector<ResultsRecord> load_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open results file: " + path);
  std::vector<ResultsRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const Error& e) {
      throw Error("SchemaViolation", path + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error("SchemaViolation",
                  path + " line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
  }
  return records;
}

}  // namespace stylometer
