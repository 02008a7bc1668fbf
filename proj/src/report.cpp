// Copyright 2026 The attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attrib/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "attrib/csv.hpp"
#include "attrib/error.hpp"
#include "attrib/exact_sum.hpp"

namespace attrib {

namespace {

double sum_of(const std::vector<double>& values) {
  ExactSum s;
  for (double v : values) s.add(v);
  return s.value();
}

void fill_totals(Report& report) {
  std::vector<ExactSum> columns(report.touchpoints);
  ExactSum grand;
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) columns[i].add(row.cells[i]);
    grand.add(row.total);
  }
  report.column_totals.clear();
  for (const auto& c : columns) report.column_totals.push_back(c.value());
  report.grand_total = grand.value();
}

double percent_base(double total) {
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kNoAttribution,
                "total campaign value is zero; percentages are undefined");
  }
  return 100.0 / total;
}

Report build(const Attribution& a, const ChannelCatalog& catalog, double scale,
             ReportUnit unit) {
  if (a.values.size() != catalog.size()) {
    throw Error(ErrorKind::kPrecondition, "attribution does not match the catalog");
  }
  Report report;
  report.method = std::string(to_string(a.method));
  report.unit = unit;
  for (ChannelId j = 0; j < catalog.size(); ++j) {
    report.rows.push_back({catalog.name(j), {}, a.values[j] * scale});
  }
  fill_totals(report);
  return report;
}

Report build(const OrderedAttribution& oa, const ChannelCatalog& catalog,
             double scale, ReportUnit unit) {
  if (oa.channels() != catalog.size()) {
    throw Error(ErrorKind::kPrecondition, "attribution does not match the catalog");
  }
  Report report;
  report.method = "ordered";
  report.unit = unit;
  report.touchpoints = oa.touchpoints();
  for (ChannelId j = 0; j < catalog.size(); ++j) {
    ReportRow row;
    row.label = catalog.name(j);
    for (double v : oa.row(j)) row.cells.push_back(v * scale);
    row.total = sum_of(row.cells);
    report.rows.push_back(std::move(row));
  }
  fill_totals(report);
  return report;
}

double rounded(double value, int precision) {
  return std::stod(format_fixed(value, precision));
}

std::string unit_name(ReportUnit unit) {
  return unit == ReportUnit::kPercent ? "percent" : "value";
}

std::string emit_csv(const Report& r, const EmitOptions& opt) {
  std::ostringstream out;
  out << "channel";
  for (std::size_t i = 1; i <= r.touchpoints; ++i) out << ",tp" << i;
  out << ",total\n";
  for (const auto& row : r.rows) {
    out << csv::escape(row.label);
    for (double c : row.cells) out << ',' << format_fixed(c, opt.precision);
    out << ',' << format_fixed(row.total, opt.precision) << '\n';
  }
  out << "TOTAL";
  for (double c : r.column_totals) out << ',' << format_fixed(c, opt.summary_precision);
  out << ',' << format_fixed(r.grand_total, opt.summary_precision) << '\n';
  return out.str();
}

std::string emit_json(const Report& r, const EmitOptions& opt) {
  nlohmann::ordered_json doc;
  doc["method"] = r.method;
  doc["unit"] = unit_name(r.unit);
  doc["touchpoints"] = r.touchpoints;
  doc["precision"] = opt.precision;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json item;
    item["channel"] = row.label;
    auto cells = nlohmann::ordered_json::array();
    for (double c : row.cells) cells.push_back(rounded(c, opt.precision));
    item["cells"] = std::move(cells);
    item["total"] = rounded(row.total, opt.precision);
    rows.push_back(std::move(item));
  }
  doc["rows"] = std::move(rows);
  auto columns = nlohmann::ordered_json::array();
  for (double c : r.column_totals) columns.push_back(rounded(c, opt.summary_precision));
  doc["column_totals"] = std::move(columns);
  doc["grand_total"] = rounded(r.grand_total, opt.summary_precision);
  return doc.dump(2) + "\n";
}

std::string emit_text(const Report& r, const EmitOptions& opt) {
  const std::size_t shown = std::min(r.touchpoints, opt.display_cap);
  const bool folded = r.touchpoints > shown;
  const char* suffix = r.unit == ReportUnit::kPercent ? "%" : "";

  std::vector<std::string> header = {"channel"};
  for (std::size_t i = 1; i <= shown; ++i) header.push_back("tp" + std::to_string(i));
  if (folded) header.push_back("tp" + std::to_string(shown + 1) + "+");
  header.push_back("total");

  auto line_for = [&](const std::string& label, const std::vector<double>& cells,
                      double total, int precision) {
    std::vector<std::string> line = {label};
    for (std::size_t i = 0; i < shown; ++i) {
      line.push_back(format_fixed(cells[i], precision) + suffix);
    }
    if (folded) {
      ExactSum tail;
      for (std::size_t i = shown; i < cells.size(); ++i) tail.add(cells[i]);
      line.push_back(format_fixed(tail.value(), precision) + suffix);
    }
    line.push_back(format_fixed(total, precision) + suffix);
    return line;
  };

  std::vector<std::vector<std::string>> table = {header};
  for (const auto& row : r.rows) {
    table.push_back(line_for(row.label, row.cells, row.total, opt.precision));
  }
  table.push_back(
      line_for("TOTAL", r.column_totals, r.grand_total, opt.summary_precision));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  std::ostringstream out;
  out << "method: " << r.method << "  unit: " << unit_name(r.unit) << '\n';
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      const std::size_t pad = width[c] - line[c].size();
      if (c == 0) {
        out << line[c] << std::string(pad, ' ');
      } else {
        out << "  " << std::string(pad, ' ') << line[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

double parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kData, "malformed number '" + text + "'");
  }
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_fixed(double value, int precision) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", std::clamp(precision, 0, 17), value);
  std::string out = buf;
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

Report to_percent(const Attribution& a, const ChannelCatalog& catalog) {
  return build(a, catalog, percent_base(a.total), ReportUnit::kPercent);
}

Report to_percent(const OrderedAttribution& oa, const ChannelCatalog& catalog) {
  ExactSum total;
  for (double c : oa.cells()) total.add(c);
  return build(oa, catalog, percent_base(total.value()), ReportUnit::kPercent);
}

Report to_values(const Attribution& a, const ChannelCatalog& catalog) {
  return build(a, catalog, 1.0, ReportUnit::kValue);
}

Report to_values(const OrderedAttribution& oa, const ChannelCatalog& catalog) {
  return build(oa, catalog, 1.0, ReportUnit::kValue);
}

EmitFormat parse_emit_format(std::string_view name) {
  if (name == "csv") return EmitFormat::kCsv;
  if (name == "json") return EmitFormat::kJson;
  if (name == "text") return EmitFormat::kText;
  throw Error(ErrorKind::kUsage, "unknown output format '" + std::string(name) +
                                     "' (expected csv, json or text)");
}

std::string emit_table(const Report& report, EmitFormat format,
                       const EmitOptions& options) {
  switch (format) {
    case EmitFormat::kCsv: return emit_csv(report, options);
    case EmitFormat::kJson: return emit_json(report, options);
    case EmitFormat::kText: return emit_text(report, options);
  }
  return {};
}

Report parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Report report;
  bool header_seen = false;
  bool total_seen = false;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_line(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields.front() != "channel" || fields.back() != "total") {
        throw Error(ErrorKind::kData, "report csv header must be channel,...,total");
      }
      report.touchpoints = fields.size() - 2;
      header_seen = true;
      continue;
    }
    if (fields.size() != report.touchpoints + 2) {
      throw Error(ErrorKind::kData, "report csv row has the wrong width");
    }
    if (total_seen) throw Error(ErrorKind::kData, "rows after the TOTAL row");
    std::vector<double> cells;
    for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
      cells.push_back(parse_number(fields[i]));
    }
    const double total = parse_number(fields.back());
    if (fields.front() == "TOTAL") {
      report.column_totals = std::move(cells);
      report.grand_total = total;
      total_seen = true;
    } else {
      report.rows.push_back({fields.front(), std::move(cells), total});
    }
  }
  if (!header_seen || !total_seen) {
    throw Error(ErrorKind::kData, "report csv needs a header and a TOTAL row");
  }
  return report;
}

Report parse_report_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    Report report;
    report.method = doc.at("method").get<std::string>();
    const auto unit = doc.at("unit").get<std::string>();
    report.unit = unit == "percent" ? ReportUnit::kPercent : ReportUnit::kValue;
    report.touchpoints = doc.at("touchpoints").get<std::size_t>();
    for (const auto& item : doc.at("rows")) {
      report.rows.push_back({item.at("channel").get<std::string>(),
                             item.at("cells").get<std::vector<double>>(),
                             item.at("total").get<double>()});
    }
    report.column_totals = doc.at("column_totals").get<std::vector<double>>();
    report.grand_total = doc.at("grand_total").get<double>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, std::string("malformed report json: ") + e.what());
  }
}

std::optional<double> Comparison::speedup() const {
  if (!seconds_a || !seconds_b || *seconds_b <= 0.0) return std::nullopt;
  return *seconds_a / *seconds_b;
}

Comparison compare(const Attribution& a, const Attribution& b,
                   const ChannelCatalog& catalog_a, const ChannelCatalog& catalog_b,
                   std::optional<double> seconds_a, std::optional<double> seconds_b) {
  if (!(catalog_a == catalog_b) || a.values.size() != catalog_a.size() ||
      b.values.size() != catalog_b.size()) {
    throw Error(ErrorKind::kPrecondition,
                "cannot compare attributions over different catalogs");
  }
  Comparison cmp;
  cmp.labels = catalog_a.names();
  cmp.method_a = std::string(to_string(a.method));
  cmp.method_b = std::string(to_string(b.method));
  cmp.a = a.values;
  cmp.b = b.values;
  cmp.seconds_a = seconds_a;
  cmp.seconds_b = seconds_b;
  const double scale = std::max(std::fabs(a.total), std::fabs(b.total));
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    const double d = std::fabs(a.values[j] - b.values[j]);
    const double rel = scale > 0.0 ? d / scale : d;
    cmp.abs_delta.push_back(d);
    cmp.rel_delta.push_back(rel);
    cmp.max_abs_delta = std::max(cmp.max_abs_delta, d);
    cmp.max_rel_delta = std::max(cmp.max_rel_delta, rel);
  }
  return cmp;
}

std::string emit_comparison(const Comparison& cmp, EmitFormat format) {
  std::ostringstream out;
  if (format == EmitFormat::kJson) {
    nlohmann::ordered_json doc;
    doc["method_a"] = cmp.method_a;
    doc["method_b"] = cmp.method_b;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < cmp.labels.size(); ++j) {
      rows.push_back({{"channel", cmp.labels[j]},
                      {"a", cmp.a[j]},
                      {"b", cmp.b[j]},
                      {"abs_delta", cmp.abs_delta[j]},
                      {"rel_delta", cmp.rel_delta[j]}});
    }
    doc["channels"] = std::move(rows);
    doc["max_abs_delta"] = cmp.max_abs_delta;
    doc["max_rel_delta"] = cmp.max_rel_delta;
    doc["seconds_a"] = cmp.seconds_a ? nlohmann::ordered_json(*cmp.seconds_a) : nullptr;
    doc["seconds_b"] = cmp.seconds_b ? nlohmann::ordered_json(*cmp.seconds_b) : nullptr;
    const auto ratio = cmp.speedup();
    doc["speedup"] = ratio ? nlohmann::ordered_json(*ratio) : nullptr;
    return doc.dump(2) + "\n";
  }
  if (format == EmitFormat::kCsv) {
    out << "channel," << cmp.method_a << ',' << cmp.method_b << ",abs_delta,rel_delta\n";
    for (std::size_t j = 0; j < cmp.labels.size(); ++j) {
      out << csv::escape(cmp.labels[j]) << ',' << fmt_g(cmp.a[j]) << ','
          << fmt_g(cmp.b[j]) << ',' << fmt_g(cmp.abs_delta[j]) << ','
          << fmt_g(cmp.rel_delta[j]) << '\n';
    }
    return out.str();
  }
  std::size_t width = 7;
  for (const auto& l : cmp.labels) width = std::max(width, l.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %18s  %18s  %10s\n", static_cast<int>(width),
                "channel", cmp.method_a.c_str(), cmp.method_b.c_str(), "rel_delta");
  out << buf;
  for (std::size_t j = 0; j < cmp.labels.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%-*s  %18.6f  %18.6f  %10.3e\n",
                  static_cast<int>(width), cmp.labels[j].c_str(), cmp.a[j], cmp.b[j],
                  cmp.rel_delta[j]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "max relative delta: %.3e\n", cmp.max_rel_delta);
  out << buf;
  if (cmp.seconds_a && cmp.seconds_b) {
    std::snprintf(buf, sizeof buf, "time %s: %.6fs  %s: %.6fs", cmp.method_a.c_str(),
                  *cmp.seconds_a, cmp.method_b.c_str(), *cmp.seconds_b);
    out << buf;
    if (auto ratio = cmp.speedup()) {
      std::snprintf(buf, sizeof buf, "  ratio: %.1fx", *ratio);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace attrib
