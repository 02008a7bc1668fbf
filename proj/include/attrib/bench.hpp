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
#include <optional>

#include <json.hpp>

#include "attrib/synth.hpp"

namespace attrib {

struct BenchOptions {
  std::size_t channels = 18;
  std::size_t journeys = 1'000'000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Channels whose phi is timed with the table-free naive evaluation; the
  /// full-run cost is at least this measurement.  0 skips it.
  std::size_t direct_channels = 1;
  /// Also time the zeta-table naive engine (needs channels <= 24).
  bool zeta = true;
  /// Repetitions of the simplified engine; the fastest is reported.
  int repeats = 5;
};

struct BenchResult {
  std::size_t channels = 0;
  std::size_t journeys = 0;
  std::size_t coalitions = 0;
  double generate_seconds = 0.0;
  double aggregate_seconds = 0.0;
  double simplified_seconds = 0.0;
  std::optional<double> zeta_naive_seconds;
  std::optional<double> zeta_max_rel_delta;
  std::optional<double> direct_seconds;  // for direct_channels channels
  std::size_t direct_channels = 0;
  std::optional<double> direct_max_rel_delta;

  /// Measured direct time over simplified engine time; a lower bound on
  /// the full direct-naive speedup.
  std::optional<double> direct_speedup_lower_bound() const;
  /// Direct time scaled to all channels.
  std::optional<double> direct_projected_seconds() const;
};

/// Journey lengths 1..11 with geometrically decaying weights and uniform
/// channel popularity.
CampaignSpec bench_campaign(std::size_t channels, std::size_t journeys,
                            std::uint64_t seed);

BenchResult run_benchmark(const BenchOptions& options);

nlohmann::ordered_json to_json(const BenchResult& result);

}  // namespace attrib
