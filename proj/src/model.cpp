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

#include "attrib/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attrib/error.hpp"

namespace attrib {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kInvalidChannel: return "invalid_channel";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kInvariant: return "invariant";
    case ErrorKind::kNoData: return "no_data";
    case ErrorKind::kNoAttribution: return "no_attribution";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kPrecondition:
      return 2;
    case ErrorKind::kCapacity:
      return 4;
    case ErrorKind::kInvariant:
      return 5;
    default:
      return 3;
  }
}

ChannelCatalog ChannelCatalog::from_labels(std::vector<std::string> labels) {
  ChannelCatalog catalog;
  for (auto& label : labels) {
    if (label.empty()) throw Error(ErrorKind::kData, "empty channel label");
    if (catalog.find(label)) {
      throw Error(ErrorKind::kData, "duplicate channel label '" + label + "'");
    }
    catalog.intern(label);
  }
  return catalog;
}

ChannelId ChannelCatalog::intern(std::string_view label) {
  if (auto it = index_.find(std::string(label)); it != index_.end()) {
    return it->second;
  }
  if (label.empty()) throw Error(ErrorKind::kData, "empty channel label");
  if (names_.size() >= kMaxChannels) {
    throw Error(ErrorKind::kCapacity,
                "more than 64 channels; group channels before attribution");
  }
  const auto id = static_cast<ChannelId>(names_.size());
  names_.emplace_back(label);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<ChannelId> ChannelCatalog::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ChannelId> CoalitionKey::members() const {
  std::vector<ChannelId> out;
  out.reserve(cardinality());
  for_each_member([&](ChannelId c) { out.push_back(c); });
  return out;
}

Money Money::from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kData, "non-finite money amount");
  }
  const double scaled = std::nearbyint(value * static_cast<double>(kScale));
  if (std::fabs(scaled) >= 9.0e18) {
    throw Error(ErrorKind::kData, "money amount out of range");
  }
  return from_micros(static_cast<std::int64_t>(scaled));
}

Money Money::parse(std::string_view text) {
  const auto bad = [&] {
    return Error(ErrorKind::kData,
                 "malformed amount '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::size_t digits = 0;
  constexpr std::int64_t kWholeLimit =
      std::numeric_limits<std::int64_t>::max() / kScale / 10;
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++digits) {
    if (whole > kWholeLimit) throw bad();
    whole = whole * 10 + (text[i] - '0');
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  int round_digit = -1;
  bool sticky = false;
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      const int d = text[i] - '0';
      if (frac_digits < 6) {
        frac = frac * 10 + d;
      } else if (round_digit < 0) {
        round_digit = d;
      } else if (d != 0) {
        sticky = true;
      }
      ++frac_digits;
      ++digits;
    }
  }
  if (digits == 0 || i != text.size()) throw bad();
  for (std::size_t k = std::min<std::size_t>(frac_digits, 6); k < 6; ++k) {
    frac *= 10;
  }
  std::int64_t micros = whole * kScale + frac;
  if (round_digit > 5 || (round_digit == 5 && (sticky || (micros & 1) != 0))) {
    ++micros;
  }
  return from_micros(negative ? -micros : micros);
}

std::string Money::to_string() const {
  const bool negative = micros_ < 0;
  const std::uint64_t magnitude =
      negative ? static_cast<std::uint64_t>(-(micros_ + 1)) + 1
               : static_cast<std::uint64_t>(micros_);
  std::string out = negative ? "-" : "";
  out += std::to_string(magnitude / kScale);
  std::uint64_t frac = magnitude % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

Journey make_journey(std::string user_id, std::span<const ChannelId> channels,
                     Money revenue, std::span<const std::int64_t> timestamps) {
  if (channels.empty()) {
    throw Error(ErrorKind::kData,
                "journey for user '" + user_id + "' has no touchpoints");
  }
  if (!timestamps.empty() && timestamps.size() != channels.size()) {
    throw Error(ErrorKind::kData, "timestamps are not parallel to touchpoints");
  }
  Journey journey;
  journey.user_id = std::move(user_id);
  journey.revenue = revenue;
  journey.touchpoints.reserve(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    Touchpoint tp;
    tp.channel = channels[k];
    tp.position = static_cast<std::uint32_t>(k + 1);
    if (!timestamps.empty()) tp.timestamp_ms = timestamps[k];
    journey.touchpoints.push_back(tp);
  }
  validate_journey(journey, kMaxChannels);
  return journey;
}

void validate_journey(const Journey& journey, std::size_t p) {
  const auto fail = [&](const std::string& what) {
    return Error(ErrorKind::kData,
                 "journey for user '" + journey.user_id + "': " + what);
  };
  if (journey.touchpoints.empty()) throw fail("no touchpoints");
  if (journey.revenue < Money{}) throw fail("negative revenue");
  std::optional<std::int64_t> last_time;
  bool all_timed = true;
  for (std::size_t k = 0; k < journey.touchpoints.size(); ++k) {
    const auto& tp = journey.touchpoints[k];
    if (tp.position != k + 1) throw fail("positions are not 1..n");
    if (tp.channel >= p) {
      throw Error(ErrorKind::kInvalidChannel,
                  "journey for user '" + journey.user_id +
                      "': channel ordinal out of range");
    }
    all_timed = all_timed && tp.timestamp_ms.has_value();
  }
  if (!all_timed) return;
  for (const auto& tp : journey.touchpoints) {
    if (last_time && *tp.timestamp_ms < *last_time) {
      throw fail("timestamps decrease along the sequence");
    }
    last_time = tp.timestamp_ms;
  }
}

CoalitionKey encode_coalition(std::span<const ChannelId> channels,
                              std::size_t p) {
  std::uint64_t bits = 0;
  for (ChannelId c : channels) {
    if (c >= kMaxChannels) {
      throw Error(ErrorKind::kCapacity,
                  "channel ordinal " + std::to_string(c) +
                      " exceeds the 64-channel coalition capacity");
    }
    if (c >= p) {
      throw Error(ErrorKind::kInvalidChannel,
                  "channel ordinal " + std::to_string(c) +
                      " is not in a catalog of " + std::to_string(p));
    }
    bits |= std::uint64_t{1} << c;
  }
  return CoalitionKey::from_bits(bits);
}

CoalitionKey distinct_channels(const Journey& journey) {
  std::uint64_t bits = 0;
  for (const auto& tp : journey.touchpoints) bits |= std::uint64_t{1} << tp.channel;
  return CoalitionKey::from_bits(bits);
}

std::vector<std::uint32_t> positions_of(const Journey& journey,
                                        ChannelId channel) {
  std::vector<std::uint32_t> out;
  for (const auto& tp : journey.touchpoints) {
    if (tp.channel == channel) out.push_back(tp.position);
  }
  return out;
}

std::string coalition_label(CoalitionKey key, const ChannelCatalog& catalog) {
  std::vector<std::string> labels;
  key.for_each_member([&](ChannelId c) { labels.push_back(catalog.name(c)); });
  std::sort(labels.begin(), labels.end());
  std::string out;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k) out += '|';
    out += labels[k];
  }
  return out;
}

}  // namespace attrib
