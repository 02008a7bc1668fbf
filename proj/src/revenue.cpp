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

#include "attrib/revenue.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "attrib/csv.hpp"
#include "attrib/error.hpp"
#include "attrib/exact_sum.hpp"
#include "attrib/parallel_fold.hpp"

namespace attrib {

namespace {

constexpr double kScale = static_cast<double>(Money::kScale);

std::int64_t journey_value(const Journey& journey, ValueKind kind) {
  return kind == ValueKind::kRevenue ? journey.revenue.micros() : Money::kScale;
}

void check_key(CoalitionKey key, std::size_t p) {
  if (key.empty()) {
    throw Error(ErrorKind::kData, "the empty coalition cannot carry value");
  }
  if (key.span() > p) {
    throw Error(ErrorKind::kInvalidChannel,
                "coalition references a channel outside 0.." +
                    std::to_string(p) + "-1");
  }
}

void check_value(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorKind::kData, "coalition values must be finite and >= 0");
  }
}

// Sorts by key and sums runs of equal keys.
template <typename Entry>
void sort_and_coalesce(std::vector<Entry>& entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < entries.size();) {
    ExactSum sum;
    std::size_t run = k;
    for (; run < entries.size() && entries[run].first == entries[k].first; ++run) {
      sum.add(entries[run].second);
    }
    entries[out] = {entries[k].first, sum.value()};
    ++out;
    k = run;
  }
  entries.resize(out);
}

struct Cell {
  std::int64_t micros = 0;
  bool seen = false;
};

using CoalitionPartial = std::unordered_map<CoalitionKey, Cell, CoalitionKeyHash>;

// (coalition, channel, position, multiplicity) -> summed micros
struct SplitKey {
  OrderedKey key;
  std::uint32_t multiplicity = 1;
  bool operator==(const SplitKey&) const = default;
};

struct SplitKeyHash {
  std::size_t operator()(const SplitKey& k) const {
    std::uint64_t mixed = k.key.coalition.bits() ^
                          (std::uint64_t{k.key.channel} << 58) ^
                          (std::uint64_t{k.key.position} * 0x9e3779b97f4a7c15ull) ^
                          (std::uint64_t{k.multiplicity} << 40);
    return CoalitionKeyHash{}(CoalitionKey::from_bits(mixed));
  }
};

using SplitPartial = std::unordered_map<SplitKey, Cell, SplitKeyHash>;

}  // namespace

CoalitionRevenue::CoalitionRevenue(std::size_t p) : p_(p) {
  if (p > kMaxChannels) {
    throw Error(ErrorKind::kCapacity, "more than 64 channels");
  }
}

CoalitionRevenue CoalitionRevenue::from_entries(std::size_t p,
                                                std::vector<Entry> entries) {
  CoalitionRevenue rev(p);
  for (const auto& [key, value] : entries) {
    check_key(key, p);
    check_value(value);
  }
  sort_and_coalesce(entries);
  ExactSum total;
  for (const auto& e : entries) total.add(e.second);
  rev.entries_ = std::move(entries);
  rev.total_ = total.value();
  return rev;
}

double CoalitionRevenue::at(CoalitionKey key) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const Entry& e, CoalitionKey k) { return e.first < k; });
  return it != entries_.end() && it->first == key ? it->second : 0.0;
}

OrderedRevenue::OrderedRevenue(std::size_t p) : p_(p) {
  if (p > kMaxChannels) {
    throw Error(ErrorKind::kCapacity, "more than 64 channels");
  }
}

OrderedRevenue OrderedRevenue::from_entries(std::size_t p,
                                            std::vector<Entry> entries) {
  OrderedRevenue orev(p);
  for (const auto& [key, value] : entries) {
    check_key(key.coalition, p);
    check_value(value);
    if (!key.coalition.contains(key.channel)) {
      throw Error(ErrorKind::kData,
                  "ordered entry channel is not a member of its coalition");
    }
    if (key.position == 0) {
      throw Error(ErrorKind::kData, "touchpoint positions are 1-based");
    }
    orev.max_position_ = std::max(orev.max_position_, key.position);
  }
  sort_and_coalesce(entries);
  orev.entries_ = std::move(entries);
  return orev;
}

UtilityTable::UtilityTable(std::size_t p, std::vector<double> values)
    : p_(p), values_(std::move(values)) {
  if (values_.size() != (std::size_t{1} << p)) {
    throw Error(ErrorKind::kPrecondition, "utility table size must be 2^p");
  }
}

CoalitionRevenue aggregate(const JourneyStore& store, AggregateOptions options) {
  const auto& journeys = store.journeys;
  auto fold = [&](std::size_t begin, std::size_t end) {
    CoalitionPartial partial;
    for (std::size_t k = begin; k < end; ++k) {
      auto& cell = partial[distinct_channels(journeys[k])];
      cell.micros += journey_value(journeys[k], options.value);
      cell.seen = true;
    }
    return partial;
  };
  auto merge = [](CoalitionPartial& into, CoalitionPartial&& from) {
    for (const auto& [key, cell] : from) {
      auto& dst = into[key];
      dst.micros += cell.micros;
      dst.seen = dst.seen || cell.seen;
    }
  };
  const CoalitionPartial cells = partitioned_fold<CoalitionPartial>(
      journeys.size(), options.threads, fold, merge);

  CoalitionRevenue rev(store.catalog.size());
  rev.entries_.reserve(cells.size());
  std::int64_t total_micros = 0;
  for (const auto& [key, cell] : cells) {
    if (cell.micros == 0 && !options.keep_zero) continue;
    check_key(key, rev.p_);
    rev.entries_.emplace_back(key, static_cast<double>(cell.micros) / kScale);
    total_micros += cell.micros;
  }
  std::sort(rev.entries_.begin(), rev.entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  rev.total_ = static_cast<double>(total_micros) / kScale;
  return rev;
}

OrderedRevenue aggregate_ordered(const JourneyStore& store,
                                 AggregateOptions options) {
  const auto& journeys = store.journeys;
  auto fold = [&](std::size_t begin, std::size_t end) {
    SplitPartial partial;
    std::array<std::uint32_t, kMaxChannels> multiplicity{};
    for (std::size_t k = begin; k < end; ++k) {
      const Journey& journey = journeys[k];
      const CoalitionKey coalition = distinct_channels(journey);
      const std::int64_t value = journey_value(journey, options.value);
      for (const auto& tp : journey.touchpoints) ++multiplicity[tp.channel];
      for (const auto& tp : journey.touchpoints) {
        SplitKey key{{coalition, tp.channel, tp.position}, multiplicity[tp.channel]};
        auto& cell = partial[key];
        cell.micros += value;
        cell.seen = true;
      }
      for (const auto& tp : journey.touchpoints) multiplicity[tp.channel] = 0;
    }
    return partial;
  };
  auto merge = [](SplitPartial& into, SplitPartial&& from) {
    for (const auto& [key, cell] : from) {
      auto& dst = into[key];
      dst.micros += cell.micros;
      dst.seen = dst.seen || cell.seen;
    }
  };
  const SplitPartial cells = partitioned_fold<SplitPartial>(
      journeys.size(), options.threads, fold, merge);

  // Deterministic order: sort the split cells, then fold multiplicities of
  // each (S, j, i) exactly.
  std::vector<std::pair<SplitKey, Cell>> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.first.key != b.first.key) return a.first.key < b.first.key;
    return a.first.multiplicity < b.first.multiplicity;
  });
  std::vector<OrderedRevenue::Entry> entries;
  for (std::size_t k = 0; k < sorted.size();) {
    const OrderedKey key = sorted[k].first.key;
    ExactSum sum;
    bool seen = false;
    for (; k < sorted.size() && sorted[k].first.key == key; ++k) {
      const auto& [split, cell] = sorted[k];
      sum.add(static_cast<double>(cell.micros) / (kScale * split.multiplicity));
      seen = seen || cell.seen;
    }
    const double value = sum.value();
    if (value == 0.0 && !(options.keep_zero && seen)) continue;
    entries.emplace_back(key, value);
  }
  return OrderedRevenue::from_entries(store.catalog.size(), std::move(entries));
}

double utility(const CoalitionRevenue& rev, CoalitionKey coalition) {
  double sum = 0.0;
  for (const auto& [key, value] : rev.entries()) {
    if (key.is_subset_of(coalition)) sum += value;
  }
  return sum;
}

UtilityTable zeta_transform(const CoalitionRevenue& rev) {
  const std::size_t p = rev.channels();
  if (p > kMaxDenseChannels) {
    throw Error(ErrorKind::kCapacity,
                "dense utility table needs p <= 24 (have " + std::to_string(p) +
                    "); use the simplified engine");
  }
  const std::size_t size = std::size_t{1} << p;
  std::vector<double> table(size, 0.0);
  for (const auto& [key, value] : rev.entries()) table[key.bits()] = value;
  for (std::size_t bit = 0; bit < p; ++bit) {
    const std::size_t mask = std::size_t{1} << bit;
    for (std::size_t s = 0; s < size; ++s) {
      if (s & mask) table[s] += table[s ^ mask];
    }
  }
  return UtilityTable(p, std::move(table));
}

double reconstruction_residual(const CoalitionRevenue& rev,
                               const OrderedRevenue& orev) {
  std::map<std::pair<CoalitionKey, ChannelId>, ExactSum> sums;
  for (const auto& [key, value] : rev.entries()) {
    key.for_each_member([&](ChannelId j) { sums[{key, j}]; });
  }
  for (const auto& [key, value] : orev.entries()) {
    sums[{key.coalition, key.channel}].add(value);
  }
  double worst = 0.0;
  for (const auto& [slot, sum] : sums) {
    const double expected = rev.at(slot.first);
    const double got = sum.value();
    const double scale = std::max(std::fabs(expected), std::fabs(got));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::fabs(got - expected) / scale);
  }
  return worst;
}

namespace {

CoalitionKey key_from_labels(std::string_view joined,
                             const ChannelCatalog& catalog, std::size_t line_no) {
  std::uint64_t bits = 0;
  std::size_t start = 0;
  while (start <= joined.size()) {
    auto bar = joined.find('|', start);
    if (bar == std::string_view::npos) bar = joined.size();
    const auto label = joined.substr(start, bar - start);
    const auto id = catalog.find(label);
    if (!id) {
      throw Error(ErrorKind::kData, "line " + std::to_string(line_no) +
                                        ": unknown channel '" +
                                        std::string(label) + "'");
    }
    bits |= std::uint64_t{1} << *id;
    start = bar + 1;
  }
  return CoalitionKey::from_bits(bits);
}

void write_double(std::ostream& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out << buf;
}

}  // namespace

void write_coalition_csv(const CoalitionRevenue& rev,
                         const ChannelCatalog& catalog, std::ostream& out) {
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& [key, value] : rev.entries()) {
    rows.emplace_back(coalition_label(key, catalog), value);
  }
  std::sort(rows.begin(), rows.end());
  out << "coalition_labels,revenue\n";
  for (const auto& [label, value] : rows) {
    out << csv::escape(label) << ',';
    write_double(out, value);
    out << '\n';
  }
}

void write_ordered_csv(const OrderedRevenue& orev, const ChannelCatalog& catalog,
                       std::ostream& out) {
  out << "coalition_labels,channel,position,revenue\n";
  for (const auto& [key, value] : orev.entries()) {
    out << csv::escape(coalition_label(key.coalition, catalog)) << ','
        << csv::escape(catalog.name(key.channel)) << ',' << key.position << ',';
    write_double(out, value);
    out << '\n';
  }
}

OrderedRevenue read_ordered_csv(std::istream& in, const ChannelCatalog& catalog) {
  std::vector<OrderedRevenue::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = csv::split_line(line);
    if (fields.size() != 4) {
      throw Error(ErrorKind::kData, "line " + std::to_string(line_no) +
                                        ": expected 4 fields");
    }
    OrderedKey key;
    key.coalition = key_from_labels(fields[0], catalog, line_no);
    const auto channel = catalog.find(fields[1]);
    if (!channel) {
      throw Error(ErrorKind::kData, "line " + std::to_string(line_no) +
                                        ": unknown channel '" + fields[1] + "'");
    }
    key.channel = *channel;
    try {
      key.position = static_cast<std::uint32_t>(std::stoul(fields[2]));
      entries.emplace_back(key, std::stod(fields[3]));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kData, "line " + std::to_string(line_no) +
                                        ": malformed number");
    }
  }
  return OrderedRevenue::from_entries(catalog.size(), std::move(entries));
}

}  // namespace attrib
