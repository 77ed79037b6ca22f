// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wdvdb/error.hpp"
#include "wdvdb/evaluation/dataset.hpp"
#include "wdvdb/evaluation/metrics.hpp"
#include "wdvdb/protocol/trace.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

struct ExclusionNote {
  std::string filter;  // ExclusionFilter::describe()
  std::int64_t removed = 0;
  AucPair metrics;     // after exclusion
  bool operator==(const ExclusionNote&) const = default;
};

/// Evaluation of one score table. Metric values are stored rounded to six
/// decimals, the precision of the serialized forms.
struct EvalReport {
  AucPair overall;
  double threshold = 0.5;
  ThresholdMetrics at_threshold;
  std::vector<SubsetMetrics> subsets;
  std::vector<WeeklyPoint> weekly;
  std::optional<LeakReport> leak;
  std::vector<ExclusionNote> exclusions;

  bool operator==(const EvalReport&) const = default;
};

namespace detail {

inline double round6(double v) { return std::round(v * 1e6) / 1e6; }
inline std::optional<double> round6(const std::optional<double>& v) {
  return v ? std::optional<double>(round6(*v)) : std::nullopt;
}
inline AucPair round6(AucPair p) {
  p.roc_auc = round6(p.roc_auc);
  p.pr_auc = round6(p.pr_auc);
  return p;
}

}  // namespace detail

inline EvalReport make_report(const ScoredDataset& d, std::span<const ExclusionFilter> exclusions = {},
                              std::optional<LeakReport> leak = std::nullopt, double threshold = 0.5) {
  using detail::round6;
  EvalReport r;
  r.overall = round6(auc_pair(d));
  r.threshold = threshold;
  r.at_threshold = threshold_metrics(d.scores, d.labels, threshold);
  r.at_threshold.accuracy = round6(r.at_threshold.accuracy);
  r.at_threshold.precision = round6(r.at_threshold.precision);
  r.at_threshold.recall = round6(r.at_threshold.recall);
  r.at_threshold.f1 = round6(r.at_threshold.f1);
  for (auto s : subset_report(d)) r.subsets.push_back({s.name, round6(s.metrics)});
  for (auto w : weekly_roc(d)) r.weekly.push_back({w.week, round6(w.metrics)});
  if (leak) {
    leak->leaked_fraction = round6(leak->leaked_fraction);
    r.leak = leak;
  }
  for (const auto& f : exclusions) {
    const auto res = apply_exclusion(d, f);
    r.exclusions.push_back({f.describe(), res.removed, round6(auc_pair(res.dataset))});
  }
  return r;
}

namespace detail {

inline std::string metric_text(const std::optional<double>& v) { return v ? text::format_fixed6(*v) : "NA"; }
inline std::string json_metric(const std::optional<double>& v) { return v ? text::format_fixed6(*v) : "null"; }
inline std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

inline std::string week_scope(const time::IsoWeek& w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "week:%04d-W%02d", w.year, w.week);
  return buf;
}

}  // namespace detail

/// TSV: header "scope metric value", then one metric per row.
inline std::string format_report_tsv(const EvalReport& r) {
  using detail::metric_text;
  std::string out = "scope\tmetric\tvalue\n";
  const auto row = [&](std::string_view scope, std::string_view metric, const std::string& value) {
    out.append(scope).append("\t").append(metric).append("\t").append(value).append("\n");
  };
  const auto pair_rows = [&](const std::string& scope, const AucPair& p) {
    row(scope, "n", std::to_string(p.n));
    row(scope, "positives", std::to_string(p.positives));
    row(scope, "ROC_AUC", metric_text(p.roc_auc));
    row(scope, "PR_AUC", metric_text(p.pr_auc));
  };
  pair_rows("overall", r.overall);
  row("overall", "threshold", text::format_fixed6(r.threshold));
  row("overall", "TP", std::to_string(r.at_threshold.tp));
  row("overall", "FP", std::to_string(r.at_threshold.fp));
  row("overall", "TN", std::to_string(r.at_threshold.tn));
  row("overall", "FN", std::to_string(r.at_threshold.fn));
  row("overall", "ACC", metric_text(r.at_threshold.accuracy));
  row("overall", "P", metric_text(r.at_threshold.precision));
  row("overall", "R", metric_text(r.at_threshold.recall));
  row("overall", "F1", metric_text(r.at_threshold.f1));
  for (const auto& s : r.subsets) pair_rows("subset:" + s.name, s.metrics);
  for (const auto& w : r.weekly) pair_rows(detail::week_scope(w.week), w.metrics);
  if (r.leak) {
    row("leak", "leaked_regular", std::to_string(r.leak->leaked_regular));
    row("leak", "leaked_vandalism", std::to_string(r.leak->leaked_vandalism));
    row("leak", "leaked_fraction", text::format_fixed6(r.leak->leaked_fraction));
  }
  for (const auto& e : r.exclusions) {
    const std::string scope = "exclusion:" + text::escape_field(e.filter);
    row(scope, "removed", std::to_string(e.removed));
    pair_rows(scope, e.metrics);
  }
  return out;
}

inline std::string format_report_json(const EvalReport& r) {
  using detail::json_metric;
  std::ostringstream o;
  const auto pair_fields = [&](const AucPair& p) {
    o << "\"n\": " << p.n << ", \"positives\": " << p.positives << ", \"ROC_AUC\": " << json_metric(p.roc_auc)
      << ", \"PR_AUC\": " << json_metric(p.pr_auc);
  };
  o << "{\n  \"overall\": {";
  pair_fields(r.overall);
  const ThresholdMetrics& t = r.at_threshold;
  o << ", \"threshold\": " << text::format_fixed6(r.threshold) << ", \"TP\": " << t.tp << ", \"FP\": " << t.fp
    << ", \"TN\": " << t.tn << ", \"FN\": " << t.fn << ", \"ACC\": " << json_metric(t.accuracy)
    << ", \"P\": " << json_metric(t.precision) << ", \"R\": " << json_metric(t.recall)
    << ", \"F1\": " << json_metric(t.f1) << "},\n  \"subsets\": [";
  for (std::size_t i = 0; i < r.subsets.size(); ++i) {
    o << (i ? ",\n    " : "\n    ") << "{\"name\": " << detail::json_string(r.subsets[i].name) << ", ";
    pair_fields(r.subsets[i].metrics);
    o << "}";
  }
  o << (r.subsets.empty() ? "" : "\n  ") << "],\n  \"weekly\": [";
  for (std::size_t i = 0; i < r.weekly.size(); ++i) {
    o << (i ? ",\n    " : "\n    ") << "{\"iso_year\": " << r.weekly[i].week.year
      << ", \"iso_week\": " << r.weekly[i].week.week << ", ";
    pair_fields(r.weekly[i].metrics);
    o << "}";
  }
  o << (r.weekly.empty() ? "" : "\n  ") << "],\n  \"leak\": ";
  if (r.leak) {
    o << "{\"leaked_regular\": " << r.leak->leaked_regular << ", \"leaked_vandalism\": " << r.leak->leaked_vandalism
      << ", \"leaked_fraction\": " << text::format_fixed6(r.leak->leaked_fraction) << "}";
  } else {
    o << "null";
  }
  o << ",\n  \"exclusions\": [";
  for (std::size_t i = 0; i < r.exclusions.size(); ++i) {
    const auto& e = r.exclusions[i];
    o << (i ? ",\n    " : "\n    ") << "{\"filter\": " << detail::json_string(e.filter) << ", \"removed\": " << e.removed
      << ", ";
    pair_fields(e.metrics);
    o << "}";
  }
  o << (r.exclusions.empty() ? "" : "\n  ") << "]\n}\n";
  return o.str();
}

namespace detail {

[[noreturn]] inline void bad_report(const std::string& what) { fail(ErrorCode::MalformedRow, "report: " + what); }

inline std::optional<double> parse_metric(std::string_view v) {
  if (v == "NA") return std::nullopt;
  const auto d = text::parse_double(v);
  if (!d) bad_report("bad metric value '" + std::string(v) + "'");
  return d;
}

inline std::int64_t parse_count(std::string_view v) {
  const auto n = text::parse_int<std::int64_t>(v);
  if (!n) bad_report("bad count '" + std::string(v) + "'");
  return *n;
}

inline bool set_pair_field(AucPair& p, std::string_view metric, std::string_view value) {
  if (metric == "n") p.n = parse_count(value);
  else if (metric == "positives") p.positives = parse_count(value);
  else if (metric == "ROC_AUC") p.roc_auc = parse_metric(value);
  else if (metric == "PR_AUC") p.pr_auc = parse_metric(value);
  else return false;
  return true;
}

}  // namespace detail

inline EvalReport parse_report_tsv(std::string_view content) {
  using namespace detail;
  EvalReport r;
  std::istringstream in{std::string(content)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line != "scope\tmetric\tvalue") bad_report("missing header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 3) bad_report("expected 3 columns: " + line);
    const std::string_view scope = f[0], metric = f[1], value = f[2];
    if (scope == "overall") {
      if (set_pair_field(r.overall, metric, value)) continue;
      ThresholdMetrics& t = r.at_threshold;
      if (metric == "threshold") r.threshold = parse_metric(value).value_or(0.5);
      else if (metric == "TP") t.tp = parse_count(value);
      else if (metric == "FP") t.fp = parse_count(value);
      else if (metric == "TN") t.tn = parse_count(value);
      else if (metric == "FN") t.fn = parse_count(value);
      else if (metric == "ACC") t.accuracy = parse_metric(value);
      else if (metric == "P") t.precision = parse_metric(value);
      else if (metric == "R") t.recall = parse_metric(value);
      else if (metric == "F1") t.f1 = parse_metric(value);
      else bad_report("unknown overall metric " + std::string(metric));
    } else if (scope.starts_with("subset:")) {
      const std::string name(scope.substr(7));
      if (r.subsets.empty() || r.subsets.back().name != name) r.subsets.push_back({name, {}});
      if (!set_pair_field(r.subsets.back().metrics, metric, value)) bad_report("unknown subset metric");
    } else if (scope.starts_with("week:")) {
      int y = 0, w = 0;
      if (std::sscanf(std::string(scope).c_str(), "week:%d-W%d", &y, &w) != 2) bad_report("bad week scope");
      const time::IsoWeek week{y, w};
      if (r.weekly.empty() || r.weekly.back().week != week) r.weekly.push_back({week, {}});
      if (!set_pair_field(r.weekly.back().metrics, metric, value)) bad_report("unknown weekly metric");
    } else if (scope == "leak") {
      if (!r.leak) r.leak = LeakReport{};
      if (metric == "leaked_regular") r.leak->leaked_regular = parse_count(value);
      else if (metric == "leaked_vandalism") r.leak->leaked_vandalism = parse_count(value);
      else if (metric == "leaked_fraction") r.leak->leaked_fraction = parse_metric(value).value_or(0.0);
      else bad_report("unknown leak metric");
    } else if (scope.starts_with("exclusion:")) {
      const auto name = text::unescape_field(scope.substr(10));
      if (!name) bad_report("bad exclusion scope");
      if (metric == "removed") {
        r.exclusions.push_back({*name, parse_count(value), {}});
      } else if (r.exclusions.empty() || r.exclusions.back().filter != *name ||
                 !set_pair_field(r.exclusions.back().metrics, metric, value)) {
        bad_report("bad exclusion row");
      }
    } else {
      bad_report("unknown scope " + std::string(scope));
    }
  }
  if (header) bad_report("empty report");
  return r;
}

inline EvalReport parse_report_json(std::string_view content) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(content);
    const auto metric = [](const nlohmann::json& v) -> std::optional<double> {
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    const auto pair = [&](const nlohmann::json& o) {
      AucPair p;
      p.n = o.at("n").get<std::int64_t>();
      p.positives = o.at("positives").get<std::int64_t>();
      p.roc_auc = metric(o.at("ROC_AUC"));
      p.pr_auc = metric(o.at("PR_AUC"));
      return p;
    };
    const auto& ov = j.at("overall");
    r.overall = pair(ov);
    r.threshold = ov.at("threshold").get<double>();
    r.at_threshold.tp = ov.at("TP").get<std::int64_t>();
    r.at_threshold.fp = ov.at("FP").get<std::int64_t>();
    r.at_threshold.tn = ov.at("TN").get<std::int64_t>();
    r.at_threshold.fn = ov.at("FN").get<std::int64_t>();
    r.at_threshold.accuracy = metric(ov.at("ACC"));
    r.at_threshold.precision = metric(ov.at("P"));
    r.at_threshold.recall = metric(ov.at("R"));
    r.at_threshold.f1 = metric(ov.at("F1"));
    for (const auto& s : j.at("subsets")) r.subsets.push_back({s.at("name").get<std::string>(), pair(s)});
    for (const auto& w : j.at("weekly"))
      r.weekly.push_back({{w.at("iso_year").get<int>(), w.at("iso_week").get<int>()}, pair(w)});
    if (const auto& l = j.at("leak"); !l.is_null())
      r.leak = LeakReport{l.at("leaked_regular").get<std::int64_t>(), l.at("leaked_vandalism").get<std::int64_t>(),
                          l.at("leaked_fraction").get<double>()};
    for (const auto& e : j.at("exclusions"))
      r.exclusions.push_back({e.at("filter").get<std::string>(), e.at("removed").get<std::int64_t>(), pair(e)});
  } catch (const nlohmann::json::exception& e) {
    detail::bad_report(e.what());
  }
  return r;
}

enum class ReportFormat { Tsv, Json };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "tsv" || name == "TSV") return ReportFormat::Tsv;
  if (name == "json" || name == "JSON") return ReportFormat::Json;
  fail(ErrorCode::IoFailure, "UnsupportedFormat: '" + std::string(name) + "' (expected tsv or json)");
}

inline std::string format_report(const EvalReport& r, ReportFormat f) {
  return f == ReportFormat::Tsv ? format_report_tsv(r) : format_report_json(r);
}

inline void write_report(const EvalReport& r, const std::filesystem::path& path, std::string_view format) {
  const ReportFormat f = parse_report_format(format);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  out << format_report(r, f);
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline EvalReport read_report(const std::filesystem::path& path, std::string_view format) {
  const ReportFormat f = parse_report_format(format);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return f == ReportFormat::Tsv ? parse_report_tsv(content) : parse_report_json(content);
}

}  // namespace wdvdb
