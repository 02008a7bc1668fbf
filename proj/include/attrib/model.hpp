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

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace attrib {

using ChannelId = std::uint32_t;

/// Coalition keys are single machine words, so a campaign holds at most
/// this many channels.  Larger campaigns must be grouped first.
inline constexpr std::size_t kMaxChannels = 64;

/// Ordered set of unique channel labels; a label's ordinal is its position.
class ChannelCatalog {
 public:
  ChannelCatalog() = default;

  /// Throws kData on empty or duplicate labels, kCapacity past 64 labels.
  static ChannelCatalog from_labels(std::vector<std::string> labels);

  /// Returns the ordinal of `label`, appending it if unseen.
  ChannelId intern(std::string_view label);

  std::optional<ChannelId> find(std::string_view label) const;
  const std::string& name(ChannelId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  friend bool operator==(const ChannelCatalog& a, const ChannelCatalog& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ChannelId> index_;
};

/// A coalition of channels stored as a 64-bit membership set.
class CoalitionKey {
 public:
  constexpr CoalitionKey() = default;
  static constexpr CoalitionKey from_bits(std::uint64_t bits) {
    CoalitionKey key;
    key.bits_ = bits;
    return key;
  }
  static constexpr CoalitionKey singleton(ChannelId channel) {
    return from_bits(std::uint64_t{1} << channel);
  }
  /// All channels 0..p-1.
  static constexpr CoalitionKey full(std::size_t p) {
    return from_bits(p >= 64 ? ~std::uint64_t{0}
                             : (std::uint64_t{1} << p) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t cardinality() const {
    return static_cast<std::size_t>(std::popcount(bits_));
  }
  constexpr bool contains(ChannelId channel) const {
    return channel < 64 && ((bits_ >> channel) & 1u) != 0;
  }
  constexpr bool is_subset_of(CoalitionKey other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr CoalitionKey with(ChannelId channel) const {
    return from_bits(bits_ | (std::uint64_t{1} << channel));
  }
  constexpr CoalitionKey without(ChannelId channel) const {
    return from_bits(bits_ & ~(std::uint64_t{1} << channel));
  }
  constexpr CoalitionKey union_with(CoalitionKey other) const {
    return from_bits(bits_ | other.bits_);
  }
  /// Highest member ordinal plus one; 0 for the empty set.
  constexpr std::size_t span() const {
    return 64 - static_cast<std::size_t>(std::countl_zero(bits_));
  }

  /// Member ordinals in ascending order.
  std::vector<ChannelId> members() const;

  template <typename Fn>
  void for_each_member(Fn&& fn) const {
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
      fn(static_cast<ChannelId>(std::countr_zero(rest)));
    }
  }

  friend constexpr auto operator<=>(CoalitionKey, CoalitionKey) = default;

 private:
  std::uint64_t bits_ = 0;
};

struct CoalitionKeyHash {
  std::size_t operator()(CoalitionKey key) const {
    // splitmix64 finalizer
    std::uint64_t z = key.bits() + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

/// Non-negative money amount held as an integer count of millionths.
class Money {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Money() = default;
  static constexpr Money from_micros(std::int64_t micros) {
    Money m;
    m.micros_ = micros;
    return m;
  }
  /// Rounds to the nearest millionth.  Throws kData on non-finite input.
  static Money from_double(double value);
  /// Parses a plain decimal literal ("12", "-3.5", "0.000001").  More than
  /// six fractional digits are rounded half-even.  Throws kData otherwise.
  static Money parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const {
    return static_cast<double>(micros_) / static_cast<double>(kScale);
  }
  /// Shortest decimal rendering: "30", "12.5", "0.000001".
  std::string to_string() const;

  constexpr Money& operator+=(Money other) {
    micros_ += other.micros_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  std::int64_t micros_ = 0;
};

struct Touchpoint {
  ChannelId channel = 0;
  std::uint32_t position = 1;  // 1-based index in the raw sequence
  std::optional<std::int64_t> timestamp_ms;

  friend bool operator==(const Touchpoint&, const Touchpoint&) = default;
};

/// One converted user's pre-conversion touchpoint sequence.
struct Journey {
  std::string user_id;
  std::vector<Touchpoint> touchpoints;
  Money revenue;

  friend bool operator==(const Journey&, const Journey&) = default;
};

/// Builds a validated journey; positions are assigned 1..n in order.
/// `timestamps` is either empty or parallel to `channels` and must be
/// non-decreasing.  Throws kData on an empty sequence, negative revenue or
/// unordered timestamps.
Journey make_journey(std::string user_id, std::span<const ChannelId> channels,
                     Money revenue,
                     std::span<const std::int64_t> timestamps = {});

/// Checks the journey's structural invariants against a catalog of size p.
void validate_journey(const Journey& journey, std::size_t p);

/// Throws kCapacity for ordinals >= 64, kInvalidChannel for ordinals >= p.
CoalitionKey encode_coalition(std::span<const ChannelId> channels,
                              std::size_t p);

CoalitionKey distinct_channels(const Journey& journey);

std::vector<std::uint32_t> positions_of(const Journey& journey,
                                        ChannelId channel);

/// "A|B|C" with labels sorted lexicographically.
std::string coalition_label(CoalitionKey key, const ChannelCatalog& catalog);

}  // namespace attrib
