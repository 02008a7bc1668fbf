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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "attrib/model.hpp"

namespace attrib {

enum class InputFormat { kJourneyJsonl, kEventCsv };

/// "journey-jsonl" or "event-csv".  Throws kUsage otherwise.
InputFormat parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

/// The converted-user population of a campaign.
struct JourneyStore {
  ChannelCatalog catalog;
  std::vector<Journey> journeys;
  std::string provenance;
  /// Conversions dropped because no touchpoint preceded them.
  std::size_t rejected_conversions = 0;

  Money total_revenue() const;
};

/// Parses a journey log.
///
/// journey-jsonl takes one object per line:
///   {"user": "u1", "revenue": 30, "touchpoints": ["A", "B"],
///    "timestamps": [1, 2]}
/// with touchpoints kept in listed order ("timestamps" optional).
///
/// event-csv takes `user_id,timestamp,channel,event_type,revenue` rows.
/// Rows are grouped by user and ordered by timestamp (ties keep file
/// order).  Each conversion closes a journey made of the impressions since
/// the previous conversion; impressions after the last conversion are
/// ignored, so users who never convert produce nothing.  A conversion with
/// no preceding impression is counted in rejected_conversions.
///
/// The catalog lists channel labels in order of first appearance.  Throws
/// kData with the 1-based line number on malformed input.
JourneyStore parse_journeys(std::istream& in, InputFormat format,
                            std::string provenance = "<stream>");
JourneyStore load_journeys(const std::filesystem::path& path,
                           InputFormat format);

/// Writes journey-jsonl.  Output is byte-stable for a given store.
void write_journeys_jsonl(const JourneyStore& store, std::ostream& out);

/// Unifies catalogs by label: `stores[0]`'s order first, then unseen
/// labels of later stores in order.
JourneyStore merge_stores(std::vector<JourneyStore> stores);

/// Channel label -> group label mapping.
class GroupMap {
 public:
  GroupMap() = default;

  /// Parses `channel,group` CSV with that header.  Throws kConfig on
  /// duplicate channels or malformed rows.
  static GroupMap parse_csv(std::istream& in);
  static GroupMap load(const std::filesystem::path& path);
  static GroupMap from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  const std::string* group_of(std::string_view channel) const;
  std::size_t size() const { return mapping_.size(); }

 private:
  std::unordered_map<std::string, std::string> mapping_;
};

/// Relabels every touchpoint with its group.  Positions and repetitions are
/// kept.  Group ordinals follow the first appearance of each group while
/// walking the source catalog, so an identity map leaves the store
/// unchanged.  Throws kConfig when a catalog channel has no group.
JourneyStore apply_grouping(const JourneyStore& store, const GroupMap& map);

enum class FilterMode { kDistinctChannels, kTouchpoints };

FilterMode parse_filter_mode(std::string_view name);
std::string_view to_string(FilterMode mode);

/// Keeps journeys whose distinct-channel (or touchpoint) count is at least
/// `min_count`.  Throws kPrecondition when min_count < 1.
JourneyStore filter_min_channels(const JourneyStore& store,
                                 std::size_t min_count, FilterMode mode);

}  // namespace attrib
