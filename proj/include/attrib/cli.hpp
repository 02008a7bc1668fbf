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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrib/ingest.hpp"
#include "attrib/report.hpp"
#include "attrib/revenue.hpp"
#include "attrib/shapley.hpp"

namespace attrib {

/// Every option of every command.  A JSON run-config uses the same names
/// (underscored); command-line flags override it.
struct RunConfig {
  std::vector<std::string> inputs;
  std::string format = "journey-jsonl";
  std::string group_map;
  std::size_t min_distinct = 1;
  std::string filter_mode = "distinct-channels";
  std::string method = "simplified";  // naive | simplified | ordered
  std::string kpi = "revenue";        // revenue | conversions
  std::string output;                 // empty: standard output
  std::string emit = "csv";
  bool percent = false;
  int precision = 3;
  int summary_precision = 2;
  std::size_t display_cap = 5;
  unsigned threads = 1;

  double tolerance = 1e-9;      // compare, validate
  std::string ordered_input;    // validate: ordered revenue CSV to audit
  std::string spec;             // synth
  std::optional<std::uint64_t> seed;  // synth, bench

  std::size_t bench_channels = 18;  // bench
  std::size_t bench_journeys = 1'000'000;
  std::size_t direct_channels = 1;
  bool zeta = true;
};

/// Throws kUsage on unknown keys or wrong types.
RunConfig run_config_from_json(const nlohmann::json& doc);

/// ingest -> [group] -> [filter].  Multiple inputs are parsed concurrently
/// and merged.
JourneyStore load_store(const RunConfig& cfg);

struct AttributionRun {
  ChannelCatalog catalog;
  Attribution channels;
  std::optional<OrderedAttribution> ordered;
  Report report;
  double total_value = 0.0;
  std::size_t journeys = 0;
  double seconds = 0.0;
};

/// aggregate -> engine -> report on an already loaded store.
AttributionRun run_attribution(const RunConfig& cfg, const JourneyStore& store);

struct AuditCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

/// Invariant audit on real data: efficiency per engine, dummy channels,
/// non-negativity, ordered reconstruction and ordered/unordered agreement.
/// `orev` defaults to aggregate_ordered(store).  Throws kNoData on an empty
/// store.
std::vector<AuditCheck> audit(const JourneyStore& store, double tolerance,
                              unsigned threads = 1,
                              const OrderedRevenue* orev = nullptr);

/// Entry point shared by the `attrib` binary and the tests.  `args` excludes
/// the program name.  Returns the process exit status: 0 success, 2 usage,
/// 3 data, 4 capacity, 5 invariant failure.  Errors are reported on `err`
/// as a single JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace attrib
