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

#include "attrib/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "attrib/csv.hpp"
#include "attrib/error.hpp"

namespace attrib {

namespace csv {

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorKind::kData, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"") != std::string_view::npos ||
      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

}  // namespace csv

namespace {

Error line_error(std::size_t line_no, const std::string& what) {
  return Error(ErrorKind::kData,
               "line " + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_int64(std::string_view text, std::size_t line_no,
                         const char* field) {
  text = csv::trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw line_error(line_no, std::string("malformed ") + field + " '" +
                                  std::string(text) + "'");
  }
  return value;
}

Money json_money(const nlohmann::json& value, std::size_t line_no) {
  if (value.is_number_unsigned() || value.is_number_integer()) {
    const auto whole = value.get<std::int64_t>();
    if (whole > INT64_MAX / Money::kScale || whole < INT64_MIN / Money::kScale) {
      throw line_error(line_no, "revenue out of range");
    }
    return Money::from_micros(whole * Money::kScale);
  }
  if (value.is_number_float()) return Money::from_double(value.get<double>());
  throw line_error(line_no, "\"revenue\" must be a number");
}

JourneyStore parse_jsonl(std::istream& in, std::string provenance) {
  JourneyStore store;
  store.provenance = std::move(provenance);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw line_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw line_error(line_no, "expected a JSON object");
    const auto user = obj.find("user");
    const auto revenue = obj.find("revenue");
    const auto touchpoints = obj.find("touchpoints");
    if (user == obj.end() || !user->is_string()) {
      throw line_error(line_no, "missing string field \"user\"");
    }
    if (revenue == obj.end()) throw line_error(line_no, "missing \"revenue\"");
    if (touchpoints == obj.end() || !touchpoints->is_array()) {
      throw line_error(line_no, "missing array field \"touchpoints\"");
    }
    const Money amount = json_money(*revenue, line_no);
    if (amount < Money{}) throw line_error(line_no, "negative revenue");
    if (touchpoints->empty()) {
      ++store.rejected_conversions;
      continue;
    }
    std::vector<ChannelId> channels;
    for (const auto& tp : *touchpoints) {
      if (!tp.is_string() || tp.get_ref<const std::string&>().empty()) {
        throw line_error(line_no, "touchpoints must be non-empty strings");
      }
      channels.push_back(store.catalog.intern(tp.get_ref<const std::string&>()));
    }
    std::vector<std::int64_t> times;
    if (auto ts = obj.find("timestamps"); ts != obj.end() && !ts->is_null()) {
      if (!ts->is_array() || ts->size() != channels.size()) {
        throw line_error(line_no,
                         "\"timestamps\" must parallel \"touchpoints\"");
      }
      for (const auto& t : *ts) {
        if (!t.is_number_integer()) {
          throw line_error(line_no, "timestamps must be integers");
        }
        times.push_back(t.get<std::int64_t>());
      }
    }
    try {
      store.journeys.push_back(
          make_journey(user->get<std::string>(), channels, amount, times));
    } catch (const Error& e) {
      throw line_error(line_no, e.what());
    }
  }
  return store;
}

struct EventRow {
  std::size_t line_no;
  std::int64_t timestamp;
  bool conversion;
  ChannelId channel;
  Money revenue;
};

JourneyStore parse_event_csv(std::istream& in, std::string provenance) {
  JourneyStore store;
  store.provenance = std::move(provenance);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::string> user_order;
  std::unordered_map<std::string, std::vector<EventRow>> by_user;

  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_line(line);
    } catch (const Error& e) {
      throw line_error(line_no, e.what());
    }
    if (!header_seen) {
      static const std::vector<std::string> kHeader = {
          "user_id", "timestamp", "channel", "event_type", "revenue"};
      std::vector<std::string> got;
      for (auto& f : fields) got.emplace_back(csv::trim(f));
      if (got != kHeader) {
        throw line_error(line_no,
                         "expected header user_id,timestamp,channel,"
                         "event_type,revenue");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      throw line_error(line_no, "expected 5 fields, got " +
                                    std::to_string(fields.size()));
    }
    const std::string user(csv::trim(fields[0]));
    if (user.empty()) throw line_error(line_no, "empty user_id");
    EventRow row{};
    row.line_no = line_no;
    row.timestamp = parse_int64(fields[1], line_no, "timestamp");
    const auto event_type = csv::trim(fields[3]);
    const auto revenue_text = csv::trim(fields[4]);
    if (event_type == "impression") {
      const auto channel = csv::trim(fields[2]);
      if (channel.empty()) throw line_error(line_no, "impression without channel");
      row.conversion = false;
      row.channel = store.catalog.intern(channel);
    } else if (event_type == "conversion") {
      if (revenue_text.empty()) {
        throw line_error(line_no, "conversion row without revenue");
      }
      row.conversion = true;
      try {
        row.revenue = Money::parse(revenue_text);
      } catch (const Error& e) {
        throw line_error(line_no, e.what());
      }
      if (row.revenue < Money{}) throw line_error(line_no, "negative revenue");
    } else {
      throw line_error(line_no, "unknown event_type '" +
                                    std::string(event_type) + "'");
    }
    auto [it, inserted] = by_user.try_emplace(user);
    if (inserted) user_order.push_back(user);
    it->second.push_back(row);
  }

  for (const auto& user : user_order) {
    auto& rows = by_user[user];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const EventRow& a, const EventRow& b) {
                       return a.timestamp < b.timestamp;
                     });
    std::vector<ChannelId> channels;
    std::vector<std::int64_t> times;
    for (const auto& row : rows) {
      if (!row.conversion) {
        channels.push_back(row.channel);
        times.push_back(row.timestamp);
        continue;
      }
      if (channels.empty()) {
        ++store.rejected_conversions;
        continue;
      }
      store.journeys.push_back(make_journey(user, channels, row.revenue, times));
      channels.clear();
      times.clear();
    }
  }
  return store;
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (name == "journey-jsonl" || name == "jsonl") return InputFormat::kJourneyJsonl;
  if (name == "event-csv" || name == "csv") return InputFormat::kEventCsv;
  throw Error(ErrorKind::kUsage, "unknown input format '" + std::string(name) +
                                     "' (expected journey-jsonl or event-csv)");
}

std::string_view to_string(InputFormat format) {
  return format == InputFormat::kJourneyJsonl ? "journey-jsonl" : "event-csv";
}

Money JourneyStore::total_revenue() const {
  Money total;
  for (const auto& j : journeys) total += j.revenue;
  return total;
}

JourneyStore parse_journeys(std::istream& in, InputFormat format,
                            std::string provenance) {
  return format == InputFormat::kJourneyJsonl
             ? parse_jsonl(in, std::move(provenance))
             : parse_event_csv(in, std::move(provenance));
}

JourneyStore load_journeys(const std::filesystem::path& path,
                           InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kData, "cannot open '" + path.string() + "'");
  }
  try {
    return parse_journeys(in, format, path.string());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_journeys_jsonl(const JourneyStore& store, std::ostream& out) {
  for (const auto& journey : store.journeys) {
    out << "{\"user\":" << nlohmann::json(journey.user_id).dump()
        << ",\"revenue\":" << journey.revenue.to_string() << ",\"touchpoints\":[";
    bool timed = true;
    for (std::size_t k = 0; k < journey.touchpoints.size(); ++k) {
      const auto& tp = journey.touchpoints[k];
      if (k) out << ',';
      out << nlohmann::json(store.catalog.name(tp.channel)).dump();
      timed = timed && tp.timestamp_ms.has_value();
    }
    out << ']';
    if (timed) {
      out << ",\"timestamps\":[";
      for (std::size_t k = 0; k < journey.touchpoints.size(); ++k) {
        if (k) out << ',';
        out << *journey.touchpoints[k].timestamp_ms;
      }
      out << ']';
    }
    out << "}\n";
  }
}

JourneyStore merge_stores(std::vector<JourneyStore> stores) {
  JourneyStore merged;
  if (stores.empty()) return merged;
  for (std::size_t s = 0; s < stores.size(); ++s) {
    auto& part = stores[s];
    std::vector<ChannelId> remap(part.catalog.size());
    for (ChannelId c = 0; c < part.catalog.size(); ++c) {
      remap[c] = merged.catalog.intern(part.catalog.name(c));
    }
    for (auto& journey : part.journeys) {
      for (auto& tp : journey.touchpoints) tp.channel = remap[tp.channel];
      merged.journeys.push_back(std::move(journey));
    }
    merged.rejected_conversions += part.rejected_conversions;
    if (s) merged.provenance += "+";
    merged.provenance += part.provenance;
  }
  return merged;
}

GroupMap GroupMap::parse_csv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_line(line);
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig,
                  "group map line " + std::to_string(line_no) + ": " + e.what());
    }
    if (fields.size() != 2) {
      throw Error(ErrorKind::kConfig, "group map line " +
                                          std::to_string(line_no) +
                                          ": expected channel,group");
    }
    std::string channel(csv::trim(fields[0]));
    std::string group(csv::trim(fields[1]));
    if (!header_seen) {
      if (channel != "channel" || group != "group") {
        throw Error(ErrorKind::kConfig,
                    "group map must start with header channel,group");
      }
      header_seen = true;
      continue;
    }
    pairs.emplace_back(std::move(channel), std::move(group));
  }
  return from_pairs(pairs);
}

GroupMap GroupMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kConfig, "cannot open group map '" + path.string() + "'");
  }
  return parse_csv(in);
}

GroupMap GroupMap::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  GroupMap map;
  for (const auto& [channel, group] : pairs) {
    if (channel.empty() || group.empty()) {
      throw Error(ErrorKind::kConfig, "group map entries must be non-empty");
    }
    if (!map.mapping_.emplace(channel, group).second) {
      throw Error(ErrorKind::kConfig,
                  "channel '" + channel + "' is mapped more than once");
    }
  }
  if (map.mapping_.empty()) {
    throw Error(ErrorKind::kConfig, "group map has no entries");
  }
  return map;
}

const std::string* GroupMap::group_of(std::string_view channel) const {
  auto it = mapping_.find(std::string(channel));
  return it == mapping_.end() ? nullptr : &it->second;
}

JourneyStore apply_grouping(const JourneyStore& store, const GroupMap& map) {
  JourneyStore out;
  out.provenance = store.provenance + " grouped";
  out.rejected_conversions = store.rejected_conversions;
  std::vector<ChannelId> remap(store.catalog.size());
  for (ChannelId c = 0; c < store.catalog.size(); ++c) {
    const std::string* group = map.group_of(store.catalog.name(c));
    if (!group) {
      throw Error(ErrorKind::kConfig, "channel '" + store.catalog.name(c) +
                                          "' has no group in the group map");
    }
    remap[c] = out.catalog.intern(*group);
  }
  out.journeys = store.journeys;
  for (auto& journey : out.journeys) {
    for (auto& tp : journey.touchpoints) tp.channel = remap[tp.channel];
  }
  return out;
}

FilterMode parse_filter_mode(std::string_view name) {
  if (name == "distinct-channels") return FilterMode::kDistinctChannels;
  if (name == "touchpoints") return FilterMode::kTouchpoints;
  throw Error(ErrorKind::kUsage, "unknown filter mode '" + std::string(name) +
                                     "' (expected distinct-channels or touchpoints)");
}

std::string_view to_string(FilterMode mode) {
  return mode == FilterMode::kDistinctChannels ? "distinct-channels"
                                               : "touchpoints";
}

JourneyStore filter_min_channels(const JourneyStore& store,
                                 std::size_t min_count, FilterMode mode) {
  if (min_count < 1) {
    throw Error(ErrorKind::kPrecondition, "min_distinct must be at least 1");
  }
  JourneyStore out;
  out.catalog = store.catalog;
  out.provenance = store.provenance;
  out.rejected_conversions = store.rejected_conversions;
  for (const auto& journey : store.journeys) {
    const std::size_t count = mode == FilterMode::kDistinctChannels
                                  ? distinct_channels(journey).cardinality()
                                  : journey.touchpoints.size();
    if (count >= min_count) out.journeys.push_back(journey);
  }
  return out;
}

}  // namespace attrib
