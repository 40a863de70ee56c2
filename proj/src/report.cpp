#include "stylometer/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "stylometer/errors.hpp"

namespace stylometer {
namespace {

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string fmt_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string sanitize_filename(const std::string& s) {
  std::string out;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    out += ok ? c : '_';
  }
  return out;
}

std::string cell_text(const ReportCell& cell) {
  std::string out = fmt_number(cell.mean);
  out += " (";
  out += cell.sd ? fmt_number(*cell.sd) : "-";
  out += ")";
  return out;
}

std::string pad(std::string s, std::size_t width) {
  while (s.size() < width) s += ' ';
  return s;
}

// Task blocks: every non-source task, with human/source records joining each
// block as their own group.
std::map<std::string, std::map<std::string, std::vector<MetricVector>>> task_blocks(
    const std::vector<ResultsRecord>& records) {
  std::set<std::string> tasks;
  for (const ResultsRecord& r : records) {
    if (r.metrics && r.task != "source") tasks.insert(r.task);
  }
  std::map<std::string, std::map<std::string, std::vector<MetricVector>>> blocks;
  for (const std::string& task : tasks) {
    auto& groups = blocks[task];
    for (const ResultsRecord& r : records) {
      if (!r.metrics) continue;
      if (r.task == task || r.task == "source") groups[r.origin].push_back(*r.metrics);
    }
    if (groups.size() < 2) blocks.erase(task);
  }
  return blocks;
}

}  // namespace

ReportTable build_report(const std::vector<ResultsRecord>& records,
                         const MannWhitneyOptions& options) {
  const auto blocks = task_blocks(records);
  if (blocks.empty()) {
    throw Error("InsufficientGroups", "results contain no task with at least two origins");
  }

  ReportTable table;
  std::set<std::string> group_names;
  for (const auto& [task, groups] : blocks) {
    (void)task;
    for (const auto& [name, vectors] : groups) {
      (void)vectors;
      group_names.insert(name);
    }
  }
  table.groups.assign(group_names.begin(), group_names.end());

  for (const auto& [task, groups] : blocks) {
    const CompareResult comparison = compare_groups(groups, options);
    for (const std::string& metric : MetricVector::field_names()) {
      const auto found =
          std::find_if(comparison.metrics.begin(), comparison.metrics.end(),
                       [&metric](const MetricComparison& m) { return m.metric == metric; });
      if (found != comparison.metrics.end()) {
        ReportRow row;
        row.task = task;
        row.metric = metric;
        for (const GroupSummary& s : found->summaries) {
          row.cells.push_back({s.group, s.n, s.mean, s.sd});
        }
        row.tests = found->pairwise;
        table.rows.push_back(std::move(row));
        continue;
      }
      // metric missing from at least one group: annotate instead of dropping
      if (auto it = comparison.skipped.find(metric); it != comparison.skipped.end()) {
        ReportRow row;
        row.task = task;
        row.metric = metric;
        bool any = false;
        for (const auto& [name, vectors] : groups) {
          std::vector<double> values;
          for (const MetricVector& mv : vectors) {
            if (const auto v = mv.get(metric)) values.push_back(*v);
          }
          if (values.empty()) continue;
          GroupSummary s = descriptive(values);
          row.cells.push_back({name, s.n, s.mean, s.sd});
          any = true;
        }
        if (any) {
          row.note = it->second;
          table.rows.push_back(std::move(row));
        }
      }
    }
  }
  return table;
}

std::string render_text(const ReportTable& table) {
  constexpr std::size_t kMetricWidth = 20;
  constexpr std::size_t kCellWidth = 18;

  std::string out;
  std::string current_task;
  for (const ReportRow& row : table.rows) {
    if (row.task != current_task) {
      current_task = row.task;
      out += "== Task: " + current_task + " ==\n";
      std::string header = pad("metric", kMetricWidth);
      for (const std::string& g : table.groups) header += "| " + pad(g, kCellWidth - 2);
      out += header + "\n";
    }
    std::string line = pad(row.metric, kMetricWidth);
    for (const std::string& g : table.groups) {
      const auto cell = std::find_if(row.cells.begin(), row.cells.end(),
                                     [&g](const ReportCell& c) { return c.group == g; });
      line += "| " + pad(cell != row.cells.end() ? cell_text(*cell) : "(absent)", kCellWidth - 2);
    }
    out += line + "\n";
    if (!row.tests.empty()) {
      std::string sig = pad("", kMetricWidth) + "  ";
      bool first = true;
      for (const PairwiseTest& t : row.tests) {
        if (!first) sig += "; ";
        first = false;
        sig += t.group_a + " vs " + t.group_b + ": " + format_significance(t.test.p_value) +
               " (U=" + fmt_number(t.test.u_statistic) + ", " + t.test.method + ")";
      }
      out += sig + "\n";
    }
    if (row.note) out += pad("", kMetricWidth) + "  note: " + *row.note + "\n";
  }
  return out;
}

nlohmann::ordered_json render_json(const ReportTable& table) {
  nlohmann::ordered_json j;
  j["groups"] = table.groups;
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();

  std::string current_task;
  nlohmann::ordered_json* block = nullptr;
  for (const ReportRow& row : table.rows) {
    if (row.task != current_task) {
      current_task = row.task;
      tasks.push_back({{"task", current_task}, {"metrics", nlohmann::ordered_json::array()}});
      block = &tasks.back()["metrics"];
    }
    nlohmann::ordered_json m;
    m["metric"] = row.metric;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const ReportCell& c : row.cells) {
      nlohmann::ordered_json cell;
      cell["group"] = c.group;
      cell["n"] = c.n;
      cell["mean"] = c.mean;
      if (c.sd) cell["sd"] = *c.sd;
      cells.push_back(std::move(cell));
    }
    m["cells"] = cells;
    nlohmann::ordered_json tests = nlohmann::ordered_json::array();
    for (const PairwiseTest& t : row.tests) {
      tests.push_back({{"group_a", t.group_a},
                       {"group_b", t.group_b},
                       {"u_statistic", t.test.u_statistic},
                       {"p_value", t.test.p_value},
                       {"method", t.test.method},
                       {"n1", t.test.n1},
                       {"n2", t.test.n2},
                       {"significance", format_significance(t.test.p_value)}});
    }
    m["tests"] = tests;
    if (row.note) m["note"] = *row.note;
    block->push_back(std::move(m));
  }
  j["tasks"] = tasks;
  return j;
}

double quantile_type7(const std::vector<double>& sorted_values, double p) {
  if (sorted_values.empty()) throw Error("EmptyInput", "quantile of empty data");
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values.front();
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - std::floor(h);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error("EmptyInput", "box statistics of empty data");
  std::sort(values.begin(), values.end());
  BoxStats stats;
  stats.q1 = quantile_type7(values, 0.25);
  stats.median = quantile_type7(values, 0.5);
  stats.q3 = quantile_type7(values, 0.75);
  const double iqr = stats.q3 - stats.q1;
  const double lo_fence = stats.q1 - 1.5 * iqr;
  const double hi_fence = stats.q3 + 1.5 * iqr;
  stats.whisker_low = values.back();
  stats.whisker_high = values.front();
  for (const double v : values) {
    if (v >= lo_fence && v < stats.whisker_low) stats.whisker_low = v;
    if (v <= hi_fence && v > stats.whisker_high) stats.whisker_high = v;
  }
  for (const double v : values) {
    if (v < stats.whisker_low || v > stats.whisker_high) stats.outliers.push_back(v);
  }
  return stats;
}

std::string render_boxplot_svg(const std::string& title, const std::string& value_label,
                               const std::vector<BoxGroup>& groups) {
  if (groups.empty()) throw Error("EmptyResults", "no groups to plot");

  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 44.0;
  constexpr double kBottom = 52.0;
  constexpr double kSlot = 120.0;
  constexpr double kPlotHeight = 280.0;
  constexpr double kBoxHalf = 28.0;
  static const char* kFills[] = {"#7fa8d9", "#e0a46c", "#8fbf8f", "#c39bd3", "#d98c8c", "#9fd0d0"};

  const double width = kLeft + kSlot * static_cast<double>(groups.size()) + kRight;
  const double height = kTop + kPlotHeight + kBottom;

  double lo = groups.front().values.front();
  double hi = lo;
  for (const BoxGroup& g : groups) {
    if (g.values.empty()) throw Error("EmptyResults", "group \"" + g.label + "\" has no values");
    for (const double v : g.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) {
    const double bump = std::max(1.0, std::abs(lo) * 0.1);
    lo -= bump;
    hi += bump;
  } else {
    const double padding = (hi - lo) * 0.05;
    lo -= padding;
    hi += padding;
  }
  const auto y = [&](double v) { return kTop + (hi - v) / (hi - lo) * kPlotHeight; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_coord(width) +
         "\" height=\"" + fmt_coord(height) + "\" viewBox=\"0 0 " + fmt_coord(width) + " " +
         fmt_coord(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt_coord(width) + "\" height=\"" + fmt_coord(height) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + fmt_coord(width / 2.0) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";

  // y axis with 5 ticks
  svg += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" + fmt_coord(kTop) + "\" x2=\"" +
         fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(kTop + kPlotHeight) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int i = 0; i < 5; ++i) {
    const double v = lo + (hi - lo) * static_cast<double>(i) / 4.0;
    const double ty = y(v);
    svg += "<line x1=\"" + fmt_coord(kLeft - 4.0) + "\" y1=\"" + fmt_coord(ty) + "\" x2=\"" +
           fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(ty) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_coord(kLeft - 8.0) + "\" y=\"" + fmt_coord(ty + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           xml_escape(fmt_number(v)) + "</text>\n";
  }
  svg += "<text transform=\"rotate(-90 16 " + fmt_coord(kTop + kPlotHeight / 2.0) + ")\" x=\"16\" y=\"" +
         fmt_coord(kTop + kPlotHeight / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(value_label) + "</text>\n";
  // x axis
  svg += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" + fmt_coord(kTop + kPlotHeight) +
         "\" x2=\"" + fmt_coord(width - kRight) + "\" y2=\"" + fmt_coord(kTop + kPlotHeight) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < groups.size(); ++i) {
    const BoxGroup& g = groups[i];
    const BoxStats stats = box_stats(g.values);
    const double cx = kLeft + kSlot * (static_cast<double>(i) + 0.5);
    const char* fill = kFills[i % (sizeof(kFills) / sizeof(kFills[0]))];

    // whisker stems and caps
    svg += "<line x1=\"" + fmt_coord(cx) + "\" y1=\"" + fmt_coord(y(stats.whisker_high)) +
           "\" x2=\"" + fmt_coord(cx) + "\" y2=\"" + fmt_coord(y(stats.q3)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_coord(cx) + "\" y1=\"" + fmt_coord(y(stats.q1)) + "\" x2=\"" +
           fmt_coord(cx) + "\" y2=\"" + fmt_coord(y(stats.whisker_low)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (const double w : {stats.whisker_high, stats.whisker_low}) {
      svg += "<line x1=\"" + fmt_coord(cx - kBoxHalf / 2.0) + "\" y1=\"" + fmt_coord(y(w)) +
             "\" x2=\"" + fmt_coord(cx + kBoxHalf / 2.0) + "\" y2=\"" + fmt_coord(y(w)) +
             "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }
    // box and median (degenerate boxes render as a line)
    const double box_top = y(stats.q3);
    const double box_height = std::max(0.0, y(stats.q1) - y(stats.q3));
    svg += "<rect x=\"" + fmt_coord(cx - kBoxHalf) + "\" y=\"" + fmt_coord(box_top) +
           "\" width=\"" + fmt_coord(2.0 * kBoxHalf) + "\" height=\"" + fmt_coord(box_height) +
           "\" fill=\"" + fill + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_coord(cx - kBoxHalf) + "\" y1=\"" + fmt_coord(y(stats.median)) +
           "\" x2=\"" + fmt_coord(cx + kBoxHalf) + "\" y2=\"" + fmt_coord(y(stats.median)) +
           "\" stroke=\"#111111\" stroke-width=\"2\"/>\n";
    for (const double o : stats.outliers) {
      svg += "<circle cx=\"" + fmt_coord(cx) + "\" cy=\"" + fmt_coord(y(o)) +
             "\" r=\"2.5\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }
    svg += "<text x=\"" + fmt_coord(cx) + "\" y=\"" + fmt_coord(kTop + kPlotHeight + 20.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(g.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> emit_boxplots(const std::vector<ResultsRecord>& records,
                                       const std::string& out_dir) {
  if (records.empty()) throw Error("EmptyResults", "no results to plot");
  const auto blocks = task_blocks(records);
  if (blocks.empty()) throw Error("EmptyResults", "results contain no plottable task groups");

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& [task, groups] : blocks) {
    for (const std::string& metric : MetricVector::field_names()) {
      std::vector<BoxGroup> box_groups;
      for (const auto& [name, vectors] : groups) {
        BoxGroup g;
        g.label = name;
        for (const MetricVector& mv : vectors) {
          if (const auto v = mv.get(metric)) g.values.push_back(*v);
        }
        if (!g.values.empty()) box_groups.push_back(std::move(g));
      }
      if (box_groups.empty()) continue;
      const std::string svg =
          render_boxplot_svg(metric + " by model (" + task + " task)", metric, box_groups);
      const std::string path = (std::filesystem::path(out_dir) /
                                (sanitize_filename(task) + "_" + sanitize_filename(metric) + ".svg"))
                                   .string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error("IoError", "cannot write SVG: " + path);
      out << svg;
      written.push_back(path);
    }
  }
  return written;
}

DetectOutcome run_detection(const std::vector<ResultsRecord>& results,
                            const DetectorConfig& config,
                            const std::optional<LogisticModel>& model,
                            std::optional<double> threshold_override) {
  if (results.empty()) throw Error("EmptyResults", "no results to run detection on");
  for (const ResultsRecord& r : results) {
    if (r.origin.empty()) throw Error("MissingLabels", "record " + r.id + " lacks an origin label");
  }

  DetectOutcome out;
  for (const ResultsRecord& r : results) {
    ResultsRecord rec = r;
    rec.verdicts.clear();
    bool usable = false;

    if (model && rec.metrics) {
      std::vector<double> features;
      bool complete = true;
      for (const std::string& name : model->feature_names) {
        if (const auto v = rec.metrics->get(name)) {
          features.push_back(*v);
        } else {
          complete = false;
          break;
        }
      }
      if (complete) {
        rec.verdicts.push_back(classify(
            *model, features, threshold_override.value_or(config.gptzero.threshold)));
        usable = true;
      }
    }
    for (const DetectorVerdict& v : r.verdicts) {
      if (v.detector_name != "detectgpt") continue;
      DetectorVerdict updated = v;
      updated.threshold = threshold_override.value_or(config.detectgpt.threshold);
      updated.label = verdict_label(updated.score, updated.threshold);
      rec.verdicts.push_back(updated);
      usable = true;
    }

    if (!usable && !rec.error) out.skipped.push_back(rec.id);
    for (const DetectorVerdict& v : rec.verdicts) {
      ConfusionCounts& counts = out.confusion[v.detector_name][rec.origin];
      ++counts.total;
      if (v.label == "ai") {
        ++counts.labeled_ai;
      } else {
        ++counts.labeled_human;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string render_confusion_text(const DetectorConfusion& confusion) {
  std::string out;
  for (const auto& [detector, origins] : confusion) {
    out += "detector: " + detector + "\n";
    out += "  " + pad("origin", 12) + pad("total", 8) + pad("ai", 6) + pad("human", 8) + "rate\n";
    for (const auto& [origin, counts] : origins) {
      const double total = static_cast<double>(counts.total);
      std::string rate;
      if (origin == "human") {
        rate = "FPR=" + fmt_number(static_cast<double>(counts.labeled_ai) / total);
      } else {
        rate = "FNR=" + fmt_number(static_cast<double>(counts.labeled_human) / total);
      }
      out += "  " + pad(origin, 12) + pad(std::to_string(counts.total), 8) +
             pad(std::to_string(counts.labeled_ai), 6) +
             pad(std::to_string(counts.labeled_human), 8) + rate + "\n";
    }
  }
  return out;
}

nlohmann::ordered_json render_confusion_json(const DetectorConfusion& confusion) {
  nlohmann::ordered_json detectors = nlohmann::ordered_json::array();
  for (const auto& [detector, origins] : confusion) {
    nlohmann::ordered_json entry;
    entry["detector"] = detector;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [origin, counts] : origins) {
      nlohmann::ordered_json row;
      row["origin"] = origin;
      row["total"] = counts.total;
      row["labeled_ai"] = counts.labeled_ai;
      row["labeled_human"] = counts.labeled_human;
      const double total = static_cast<double>(counts.total);
      if (origin == "human") {
        row["false_positive_rate"] = static_cast<double>(counts.labeled_ai) / total;
      } else {
        row["false_negative_rate"] = static_cast<double>(counts.labeled_human) / total;
      }
      rows.push_back(std::move(row));
    }
    entry["origins"] = rows;
    detectors.push_back(std::move(entry));
  }
  return nlohmann::ordered_json{{"detectors", detectors}};
}

}  // namespace stylometer
