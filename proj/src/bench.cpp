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

#include "attrib/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "attrib/revenue.hpp"
#include "attrib/shapley.hpp"

namespace attrib {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double seconds(Fn&& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_rel_delta(const std::vector<double>& a, const std::vector<double>& b,
                     double total) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) {
    worst = std::max(worst, std::fabs(a[j] - b[j]) / total);
  }
  return worst;
}

}  // namespace

std::optional<double> BenchResult::direct_speedup_lower_bound() const {
  if (!direct_seconds || simplified_seconds <= 0.0) return std::nullopt;
  return *direct_seconds / simplified_seconds;
}

std::optional<double> BenchResult::direct_projected_seconds() const {
  if (!direct_seconds || direct_channels == 0) return std::nullopt;
  return *direct_seconds * static_cast<double>(channels) /
         static_cast<double>(direct_channels);
}

CampaignSpec bench_campaign(std::size_t channels, std::size_t journeys,
                            std::uint64_t seed) {
  CampaignSpec spec;
  spec.channels = channels;
  spec.journeys = journeys;
  spec.seed = seed;
  spec.length_weights.clear();
  double w = 1.0;
  for (int k = 0; k < 11; ++k, w *= 0.5) spec.length_weights.push_back(w);
  spec.revenue_log_mean = 4.0;
  spec.revenue_log_sigma = 1.0;
  return spec;
}

BenchResult run_benchmark(const BenchOptions& options) {
  BenchResult result;
  result.channels = options.channels;
  result.journeys = options.journeys;

  JourneyStore store;
  result.generate_seconds = seconds([&] {
    store = generate(bench_campaign(options.channels, options.journeys, options.seed));
  });

  CoalitionRevenue rev;
  result.aggregate_seconds = seconds([&] {
    rev = aggregate(store, {.threads = options.threads});
  });
  result.coalitions = rev.size();

  Attribution simplified;
  result.simplified_seconds = INFINITY;
  for (int r = 0; r < std::max(options.repeats, 1); ++r) {
    result.simplified_seconds = std::min(
        result.simplified_seconds, seconds([&] { simplified = shapley_simplified(rev); }));
  }
  const double total = rev.total() > 0.0 ? rev.total() : 1.0;

  if (options.zeta && options.channels <= kMaxDenseChannels) {
    Attribution naive;
    result.zeta_naive_seconds = seconds([&] { naive = shapley_naive(rev); });
    result.zeta_max_rel_delta = max_rel_delta(naive.values, simplified.values, total);
  }

  const std::size_t k = std::min(options.direct_channels, options.channels);
  if (k > 0) {
    std::vector<double> direct(k);
    result.direct_seconds = seconds([&] {
      for (std::size_t j = 0; j < k; ++j) {
        direct[j] = shapley_naive_direct_channel(rev, static_cast<ChannelId>(j));
      }
    });
    result.direct_channels = k;
    result.direct_max_rel_delta = max_rel_delta(direct, simplified.values, total);
  }
  return result;
}

nlohmann::ordered_json to_json(const BenchResult& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json doc;
  doc["channels"] = r.channels;
  doc["journeys"] = r.journeys;
  doc["coalitions"] = r.coalitions;
  doc["generate_seconds"] = r.generate_seconds;
  doc["aggregate_seconds"] = r.aggregate_seconds;
  doc["simplified_seconds"] = r.simplified_seconds;
  doc["zeta_naive_seconds"] = opt(r.zeta_naive_seconds);
  doc["zeta_max_rel_delta"] = opt(r.zeta_max_rel_delta);
  doc["direct_channels"] = r.direct_channels;
  doc["direct_seconds"] = opt(r.direct_seconds);
  doc["direct_projected_seconds"] = opt(r.direct_projected_seconds());
  doc["direct_speedup_lower_bound"] = opt(r.direct_speedup_lower_bound());
  doc["direct_max_rel_delta"] = opt(r.direct_max_rel_delta);
  return doc;
}

}  // namespace attrib
