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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrib/ingest.hpp"

namespace attrib {

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded from one 64-bit value
/// with splitmix64.  Sampling helpers are defined here too so that every
/// implementation of the generator draws identical streams.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform();
  /// Index drawn with probability proportional to cumulative[i] -
  /// cumulative[i-1]; `cumulative` is non-decreasing and ends at 1.
  std::size_t categorical(const std::vector<double>& cumulative);
  /// Standard normal via Box-Muller (one draw per call, two uniforms).
  double normal();

 private:
  std::uint64_t s_[4];
};

/// Shape of a synthetic campaign.
struct CampaignSpec {
  std::size_t channels = 18;
  std::size_t journeys = 1000;
  /// Relative weights of journey lengths 1..N_max.
  std::vector<double> length_weights = {1.0};
  /// Relative channel popularity; empty means uniform.
  std::vector<double> channel_weights;
  /// Fraction of journeys that are single-touch visits to a loyal channel.
  double loyal_share = 0.0;
  std::vector<ChannelId> loyal_channels;
  /// Revenue ~ exp(N(log_mean, log_sigma)), rounded to cents.
  double revenue_log_mean = 3.0;
  double revenue_log_sigma = 1.0;
  std::uint64_t seed = 1;
  /// Channel labels; defaults to ch01, ch02, ...
  std::vector<std::string> channel_names;

  /// Throws kConfig on an invalid spec.
  void validate() const;
  std::size_t max_length() const { return length_weights.size(); }
};

/// Reads the spec from JSON.  Keys mirror the struct fields; "loyal_channels"
/// accepts ordinals or labels.  Throws kConfig on unknown keys or bad types.
CampaignSpec campaign_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CampaignSpec& spec);
CampaignSpec load_campaign_spec(const std::filesystem::path& path);

/// Draws journeys deterministically from spec.seed.  Per journey: with
/// probability loyal_share a single touchpoint on a loyal channel; otherwise
/// a length from length_weights and i.i.d. channels by popularity (repeats
/// allowed).  Then a revenue draw.  The catalog lists all channels.
JourneyStore generate(const CampaignSpec& spec);

}  // namespace attrib
