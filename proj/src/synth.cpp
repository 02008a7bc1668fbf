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

#include "attrib/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "attrib/error.hpp"

namespace attrib {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::vector<double> cumulative(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> out;
  out.reserve(weights.size());
  double running = 0.0;
  for (double w : weights) {
    running += w;
    out.push_back(running / total);
  }
  out.back() = 1.0;
  return out;
}

void check_weights(const std::vector<double>& weights, const char* name) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::kConfig, std::string(name) + " must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kConfig, std::string(name) + " must have a positive sum");
  }
}

std::string default_name(std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ch%02zu", ordinal + 1);
  return buf;
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Xoshiro256::categorical(const std::vector<double>& cumulative) {
  const double u = uniform();
  std::size_t k = 0;
  while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
  return k;
}

double Xoshiro256::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void CampaignSpec::validate() const {
  if (channels < 1 || channels > kMaxChannels) {
    throw Error(ErrorKind::kConfig, "channels must be in 1..64");
  }
  if (journeys < 1) throw Error(ErrorKind::kConfig, "journeys must be >= 1");
  if (length_weights.empty()) {
    throw Error(ErrorKind::kConfig, "length_weights must not be empty");
  }
  check_weights(length_weights, "length_weights");
  if (!channel_weights.empty()) {
    if (channel_weights.size() != channels) {
      throw Error(ErrorKind::kConfig, "channel_weights needs one weight per channel");
    }
    check_weights(channel_weights, "channel_weights");
  }
  if (!(loyal_share >= 0.0 && loyal_share <= 1.0)) {
    throw Error(ErrorKind::kConfig, "loyal_share must be in [0, 1]");
  }
  if (loyal_share > 0.0 && loyal_channels.empty()) {
    throw Error(ErrorKind::kConfig, "loyal_share > 0 needs loyal_channels");
  }
  for (ChannelId c : loyal_channels) {
    if (c >= channels) throw Error(ErrorKind::kConfig, "loyal channel out of range");
  }
  if (!std::isfinite(revenue_log_mean) || !std::isfinite(revenue_log_sigma) ||
      revenue_log_sigma < 0.0) {
    throw Error(ErrorKind::kConfig, "revenue parameters must be finite, sigma >= 0");
  }
  if (!channel_names.empty()) {
    if (channel_names.size() != channels) {
      throw Error(ErrorKind::kConfig, "channel_names needs one label per channel");
    }
    ChannelCatalog::from_labels(channel_names);
  }
}

CampaignSpec campaign_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "campaign spec must be an object");
  CampaignSpec spec;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "channels") {
        spec.channels = value.get<std::size_t>();
      } else if (key == "journeys") {
        spec.journeys = value.get<std::size_t>();
      } else if (key == "length_weights") {
        spec.length_weights = value.get<std::vector<double>>();
      } else if (key == "channel_weights") {
        spec.channel_weights = value.get<std::vector<double>>();
      } else if (key == "loyal_share") {
        spec.loyal_share = value.get<double>();
      } else if (key == "revenue_log_mean") {
        spec.revenue_log_mean = value.get<double>();
      } else if (key == "revenue_log_sigma") {
        spec.revenue_log_sigma = value.get<double>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else if (key == "channel_names") {
        spec.channel_names = value.get<std::vector<std::string>>();
      } else if (key != "loyal_channels") {
        throw Error(ErrorKind::kConfig, "unknown campaign spec key '" + key + "'");
      }
    }
    if (auto it = doc.find("loyal_channels"); it != doc.end()) {
      for (const auto& item : *it) {
        if (item.is_string()) {
          const auto& label = item.get_ref<const std::string&>();
          std::size_t found = spec.channels;
          for (std::size_t c = 0; c < spec.channels; ++c) {
            const std::string name = spec.channel_names.empty()
                                         ? default_name(c)
                                         : spec.channel_names.at(c);
            if (name == label) found = c;
          }
          if (found == spec.channels) {
            throw Error(ErrorKind::kConfig, "unknown loyal channel '" + label + "'");
          }
          spec.loyal_channels.push_back(static_cast<ChannelId>(found));
        } else {
          spec.loyal_channels.push_back(item.get<ChannelId>());
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("campaign spec: ") + e.what());
  } catch (const std::out_of_range&) {
    throw Error(ErrorKind::kConfig, "campaign spec: channel_names too short");
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const CampaignSpec& spec) {
  nlohmann::json doc;
  doc["channels"] = spec.channels;
  doc["journeys"] = spec.journeys;
  doc["length_weights"] = spec.length_weights;
  doc["channel_weights"] = spec.channel_weights;
  doc["loyal_share"] = spec.loyal_share;
  doc["loyal_channels"] = spec.loyal_channels;
  doc["revenue_log_mean"] = spec.revenue_log_mean;
  doc["revenue_log_sigma"] = spec.revenue_log_sigma;
  doc["seed"] = spec.seed;
  doc["channel_names"] = spec.channel_names;
  return doc;
}

CampaignSpec load_campaign_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open '" + path.string() + "'");
  try {
    return campaign_spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
}

JourneyStore generate(const CampaignSpec& spec) {
  spec.validate();
  JourneyStore store;
  store.provenance = "synth seed=" + std::to_string(spec.seed);
  for (std::size_t c = 0; c < spec.channels; ++c) {
    store.catalog.intern(spec.channel_names.empty() ? default_name(c)
                                                    : spec.channel_names[c]);
  }
  const auto length_cum = cumulative(spec.length_weights);
  const auto channel_cum = cumulative(spec.channel_weights.empty()
                                          ? std::vector<double>(spec.channels, 1.0)
                                          : spec.channel_weights);
  Xoshiro256 rng(spec.seed);
  std::vector<ChannelId> path;
  store.journeys.reserve(spec.journeys);
  for (std::size_t n = 0; n < spec.journeys; ++n) {
    path.clear();
    if (spec.loyal_share > 0.0 && rng.uniform() < spec.loyal_share) {
      const auto pick = static_cast<std::size_t>(
          rng.uniform() * static_cast<double>(spec.loyal_channels.size()));
      path.push_back(spec.loyal_channels[pick]);
    } else {
      const std::size_t length = rng.categorical(length_cum) + 1;
      for (std::size_t k = 0; k < length; ++k) {
        path.push_back(static_cast<ChannelId>(rng.categorical(channel_cum)));
      }
    }
    const double amount =
        std::exp(spec.revenue_log_mean + spec.revenue_log_sigma * rng.normal());
    const auto cents = static_cast<std::int64_t>(std::llround(amount * 100.0));
    store.journeys.push_back(make_journey("u" + std::to_string(n + 1), path,
                                          Money::from_micros(cents * 10'000)));
  }
  return store;
}

}  // namespace attrib
