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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/model.hpp"
#include "attrib/shapley.hpp"

namespace attrib {

enum class ReportUnit { kPercent, kValue };

struct ReportRow {
  std::string label;
  std::vector<double> cells;  // one per touchpoint; empty for channel-only reports
  double total = 0.0;         // sum of cells (or phi_j when there are none)
};

/// Channel x touchpoint table in full precision.  Rounding happens only
/// when a table is emitted.
struct Report {
  std::string method;
  ReportUnit unit = ReportUnit::kPercent;
  std::size_t touchpoints = 0;
  std::vector<ReportRow> rows;
  std::vector<double> column_totals;
  double grand_total = 0.0;
};

/// 100 * phi / total.  Throws kNoAttribution when the total is not
/// positive.
Report to_percent(const Attribution& a, const ChannelCatalog& catalog);
Report to_percent(const OrderedAttribution& oa, const ChannelCatalog& catalog);

/// Same layout with raw credit values.
Report to_values(const Attribution& a, const ChannelCatalog& catalog);
Report to_values(const OrderedAttribution& oa, const ChannelCatalog& catalog);

enum class EmitFormat { kCsv, kJson, kText };

EmitFormat parse_emit_format(std::string_view name);

struct EmitOptions {
  int precision = 3;          // channel rows
  int summary_precision = 2;  // the TOTAL row
  std::size_t display_cap = 5;  // text only: later touchpoints fold into one column
};

/// csv:  `channel,tp1..tpN,total`, one row per channel, then `TOTAL`.
/// json: {"method", "unit", "touchpoints", "rows": [{"channel", "cells",
///        "total"}], "column_totals", "grand_total"}.
/// text: aligned columns for a terminal.
/// Values are rounded half-even at the requested precision.
std::string emit_table(const Report& report, EmitFormat format,
                       const EmitOptions& options = {});

/// Readers for the csv and json layouts.  Throws kData on malformed input.
Report parse_report_csv(std::string_view text);
Report parse_report_json(std::string_view text);

/// Fixed-point rendering with "-0" normalised to "0".
std::string format_fixed(double value, int precision);

struct Comparison {
  std::vector<std::string> labels;
  std::string method_a;
  std::string method_b;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> abs_delta;
  /// |a_j - b_j| relative to the larger of the two totals.
  std::vector<double> rel_delta;
  double max_abs_delta = 0.0;
  double max_rel_delta = 0.0;
  std::optional<double> seconds_a;
  std::optional<double> seconds_b;

  std::optional<double> speedup() const;  // seconds_a / seconds_b
  bool within(double tolerance) const { return max_rel_delta <= tolerance; }
};

/// Throws kPrecondition when the catalogs differ.
Comparison compare(const Attribution& a, const Attribution& b,
                   const ChannelCatalog& catalog_a, const ChannelCatalog& catalog_b,
                   std::optional<double> seconds_a = std::nullopt,
                   std::optional<double> seconds_b = std::nullopt);

std::string emit_comparison(const Comparison& cmp, EmitFormat format);

}  // namespace attrib
