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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "attrib/ingest.hpp"
#include "attrib/model.hpp"

namespace attrib {

/// Dense utility tables hold 2^p doubles; beyond this the naive engine is
/// refused and callers should use the simplified engine.
inline constexpr std::size_t kMaxDenseChannels = 24;

/// What a converted journey is worth.
enum class ValueKind {
  kRevenue,      // the journey's revenue
  kConversions,  // 1 per journey
};

struct AggregateOptions {
  unsigned threads = 1;
  ValueKind value = ValueKind::kRevenue;
  /// Store coalitions whose only journeys carried zero value.
  bool keep_zero = false;
};

/// Sparse individual contribution R(S): value of the journeys whose
/// distinct channel set is exactly S.  Entries are kept sorted by key.
class CoalitionRevenue {
 public:
  using Entry = std::pair<CoalitionKey, double>;

  explicit CoalitionRevenue(std::size_t p = 0);

  /// Duplicate keys are summed.  Throws kData for the empty coalition or a
  /// negative or non-finite value, kInvalidChannel for keys outside 0..p-1.
  static CoalitionRevenue from_entries(std::size_t p, std::vector<Entry> entries);

  std::size_t channels() const { return p_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Total campaign value v(P).
  double total() const { return total_; }
  /// R(S); 0 when S was never observed.
  double at(CoalitionKey key) const;

 private:
  friend CoalitionRevenue aggregate(const JourneyStore&, AggregateOptions);

  std::size_t p_ = 0;
  std::vector<Entry> entries_;
  double total_ = 0.0;
};

struct OrderedKey {
  CoalitionKey coalition;
  ChannelId channel = 0;
  std::uint32_t position = 1;

  friend constexpr auto operator<=>(const OrderedKey&, const OrderedKey&) = default;
};

/// Position-resolved contribution: the share of R(S) earned by channel j
/// while it sat at touchpoint i.  Entries are kept sorted by key.
class OrderedRevenue {
 public:
  using Entry = std::pair<OrderedKey, double>;

  explicit OrderedRevenue(std::size_t p = 0);

  /// Duplicate keys are summed.  Throws kData when a channel is not a
  /// member of its coalition, a position is 0, or a value is negative.
  static OrderedRevenue from_entries(std::size_t p, std::vector<Entry> entries);

  std::size_t channels() const { return p_; }
  /// Longest touchpoint index carrying any value (N).
  std::uint32_t max_position() const { return max_position_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::size_t p_ = 0;
  std::uint32_t max_position_ = 0;
  std::vector<Entry> entries_;
};

/// Dense v(S) for every S over p channels, indexed by coalition bits.
class UtilityTable {
 public:
  UtilityTable(std::size_t p, std::vector<double> values);

  std::size_t channels() const { return p_; }
  double operator[](CoalitionKey key) const { return values_[key.bits()]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t p_;
  std::vector<double> values_;
};

/// Folds journeys into R(S).  Integer micro-unit sums make the result
/// identical for any thread count.
CoalitionRevenue aggregate(const JourneyStore& store, AggregateOptions options = {});

/// Folds journeys into R^i(S, j).  A channel seen at m positions of a
/// journey earns value/m at each of them.  Per-key sums are exact so the
/// result does not depend on the thread count.
OrderedRevenue aggregate_ordered(const JourneyStore& store,
                                 AggregateOptions options = {});

/// v(S) = sum of R(T) over stored T that are subsets of S.
double utility(const CoalitionRevenue& rev, CoalitionKey coalition);

/// v(S) for all 2^p coalitions by the subset-sum (zeta) transform,
/// O(p 2^p).  Throws kCapacity past kMaxDenseChannels.
UtilityTable zeta_transform(const CoalitionRevenue& rev);

/// Largest |sum_i R^i(S, j) - R(S)| / max(R(S), tiny) over all (S, j in S),
/// including coalitions present in only one of the two maps.
double reconstruction_residual(const CoalitionRevenue& rev,
                               const OrderedRevenue& orev);

/// Debug dumps.  Coalition CSV: `coalition_labels,revenue`; ordered CSV:
/// `coalition_labels,channel,position,revenue`.  Labels are sorted and
/// joined by '|'.
void write_coalition_csv(const CoalitionRevenue& rev,
                         const ChannelCatalog& catalog, std::ostream& out);
void write_ordered_csv(const OrderedRevenue& orev, const ChannelCatalog& catalog,
                       std::ostream& out);
OrderedRevenue read_ordered_csv(std::istream& in, const ChannelCatalog& catalog);

}  // namespace attrib
