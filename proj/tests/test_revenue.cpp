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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "attrib/error.hpp"
#include "attrib/revenue.hpp"
#include "oracle.hpp"

using namespace attrib;

namespace {

constexpr ChannelId A = 0, B = 1, C = 2;
const CoalitionKey kA = CoalitionKey::from_bits(0b001);
const CoalitionKey kB = CoalitionKey::from_bits(0b010);
const CoalitionKey kAB = CoalitionKey::from_bits(0b011);

JourneyStore store_of(std::size_t p,
                      const std::vector<std::pair<std::vector<ChannelId>, std::string>>& rows) {
  JourneyStore store;
  for (std::size_t c = 0; c < p; ++c) store.catalog.intern(std::string(1, char('A' + c)));
  int n = 0;
  for (const auto& [path, revenue] : rows) {
    store.journeys.push_back(
        make_journey("u" + std::to_string(n++), path, Money::parse(revenue)));
  }
  return store;
}

double ordered_at(const OrderedRevenue& orev, CoalitionKey s, ChannelId j, std::uint32_t i) {
  for (const auto& [key, value] : orev.entries()) {
    if (key.coalition == s && key.channel == j && key.position == i) return value;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("aggregate buckets journeys by distinct channel set") {
  const auto rev = aggregate(store_of(2, {{{A}, "10"}, {{B}, "20"}, {{A, B}, "30"}}));
  CHECK(rev.size() == 3);
  CHECK(rev.at(kA) == 10.0);
  CHECK(rev.at(kB) == 20.0);
  CHECK(rev.at(kAB) == 30.0);
  CHECK(rev.total() == 60.0);

  CHECK(aggregate(store_of(1, {{{A}, "10"}, {{A}, "5"}})).at(kA) == 15.0);
  CHECK(aggregate(store_of(2, {{{A, B, A}, "12"}})).at(kAB) == 12.0);
}

TEST_CASE("aggregate zero-value handling and conversion counting") {
  const auto store = store_of(2, {{{A}, "0"}, {{B}, "4"}, {{B}, "0"}});
  const auto dropped = aggregate(store);
  CHECK(dropped.size() == 1);
  const auto kept = aggregate(store, {.keep_zero = true});
  CHECK(kept.size() == 2);
  CHECK(kept.at(kA) == 0.0);
  const auto counts = aggregate(store, {.value = ValueKind::kConversions});
  CHECK(counts.at(kA) == 1.0);
  CHECK(counts.at(kB) == 2.0);
  CHECK(counts.total() == 3.0);
}

TEST_CASE("aggregate_ordered splits repeated channels evenly") {
  const auto one = aggregate_ordered(store_of(2, {{{A, B}, "30"}}));
  CHECK(one.size() == 2);
  CHECK(ordered_at(one, kAB, A, 1) == 30.0);
  CHECK(ordered_at(one, kAB, B, 2) == 30.0);
  CHECK(one.max_position() == 2);

  const auto rep = aggregate_ordered(store_of(2, {{{A, A, B}, "12"}}));
  CHECK(ordered_at(rep, kAB, A, 1) == 6.0);
  CHECK(ordered_at(rep, kAB, A, 2) == 6.0);
  CHECK(ordered_at(rep, kAB, B, 3) == 12.0);
  CHECK(rep.max_position() == 3);

  const auto single = aggregate_ordered(store_of(1, {{{A}, "100"}}));
  CHECK(ordered_at(single, kA, A, 1) == 100.0);
}

TEST_CASE("utility by subset sum") {
  const auto rev = aggregate(store_of(2, {{{A}, "10"}, {{B}, "20"}, {{A, B}, "30"}}));
  CHECK(utility(rev, kA) == 10.0);
  CHECK(utility(rev, kAB) == 60.0);
  CHECK(utility(rev, CoalitionKey{}) == 0.0);
}

TEST_CASE("zeta_transform examples") {
  const auto rev = aggregate(store_of(2, {{{A}, "10"}, {{B}, "20"}, {{A, B}, "30"}}));
  const auto table = zeta_transform(rev);
  CHECK(std::vector<double>(table.values().begin(), table.values().end()) ==
        std::vector<double>{0, 10, 20, 60});

  const auto empty = zeta_transform(CoalitionRevenue(3));
  CHECK(std::all_of(empty.values().begin(), empty.values().end(),
                    [](double v) { return v == 0.0; }));

  const auto abc = CoalitionRevenue::from_entries(3, {{CoalitionKey::from_bits(0b111), 7.0}});
  const auto t = zeta_transform(abc);
  for (std::uint64_t s = 0; s < 8; ++s) {
    CHECK(t[CoalitionKey::from_bits(s)] == (s == 0b111 ? 7.0 : 0.0));
  }
}

TEST_CASE("zeta_transform capacity guard") {
  try {
    zeta_transform(CoalitionRevenue(25));
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCapacity);
  }
}

TEST_CASE("zeta_transform agrees with direct subset sums exhaustively") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 1 + static_cast<int>(rng() % 12);
    const auto game = oracle::random_game(rng, p, 1 + static_cast<int>(rng() % 60), true);
    const auto rev = oracle::to_revenue(game, p);
    const auto table = zeta_transform(rev);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << p); ++s) {
      const auto key = CoalitionKey::from_bits(s);
      CHECK(table[key] == utility(rev, key));
      CHECK(static_cast<long double>(table[key]) == oracle::utility(game, s));
    }
  }
}

TEST_CASE("utility table invariants") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 9);
    const auto rev = oracle::to_revenue(oracle::random_game(rng, p, 40), p);
    const auto table = zeta_transform(rev);
    CHECK(table[CoalitionKey{}] == 0.0);
    CHECK(table[CoalitionKey::full(p)] == doctest::Approx(rev.total()).epsilon(1e-12));
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << p); ++s) {
      for (int j = 0; j < p; ++j) {
        const auto key = CoalitionKey::from_bits(s);
        CHECK(table[key] <= table[key.with(static_cast<ChannelId>(j))]);
      }
    }
  }
}

TEST_CASE("ordered reconstruction on random stores") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto store = oracle::random_store(rng, 2 + static_cast<int>(rng() % 7), 150, 9);
    const auto rev = aggregate(store);
    const auto orev = aggregate_ordered(store);
    CHECK(reconstruction_residual(rev, orev) <= 1e-9);
    CHECK(rev.total() == doctest::Approx(store.total_revenue().to_double()).epsilon(1e-12));
    for (const auto& [key, value] : orev.entries()) {
      CHECK(key.coalition.contains(key.channel));
      CHECK(key.position <= orev.max_position());
    }
  }
}

TEST_CASE("aggregation is independent of journey order and thread count") {
  std::mt19937_64 rng(24);
  auto store = oracle::random_store(rng, 7, 2000, 8);
  const auto base = aggregate(store);
  const auto base_ordered = aggregate_ordered(store);
  std::shuffle(store.journeys.begin(), store.journeys.end(), rng);
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    const auto rev = aggregate(store, {.threads = threads});
    CHECK(std::equal(rev.entries().begin(), rev.entries().end(), base.entries().begin(),
                     base.entries().end()));
    CHECK(rev.total() == base.total());
    const auto orev = aggregate_ordered(store, {.threads = threads});
    CHECK(std::equal(orev.entries().begin(), orev.entries().end(),
                     base_ordered.entries().begin(), base_ordered.entries().end()));
  }
}

TEST_CASE("from_entries validation") {
  CHECK_THROWS_AS(CoalitionRevenue::from_entries(2, {{CoalitionKey{}, 1.0}}), Error);
  CHECK_THROWS_AS(CoalitionRevenue::from_entries(2, {{kA, -1.0}}), Error);
  CHECK_THROWS_AS(CoalitionRevenue::from_entries(1, {{kAB, 1.0}}), Error);
  const auto merged = CoalitionRevenue::from_entries(2, {{kA, 1.0}, {kB, 2.0}, {kA, 3.0}});
  CHECK(merged.size() == 2);
  CHECK(merged.at(kA) == 4.0);
  CHECK_THROWS_AS(OrderedRevenue::from_entries(2, {{{kB, A, 1}, 1.0}}), Error);
  CHECK_THROWS_AS(OrderedRevenue::from_entries(2, {{{kA, A, 0}, 1.0}}), Error);
}

TEST_CASE("debug csv dumps") {
  const auto store = store_of(3, {{{C, A}, "3"}, {{B}, "1.5"}});
  std::ostringstream out;
  write_coalition_csv(aggregate(store), store.catalog, out);
  CHECK(out.str() == "coalition_labels,revenue\nA|C,3\nB,1.5\n");

  const auto orev = aggregate_ordered(store);
  std::ostringstream ordered;
  write_ordered_csv(orev, store.catalog, ordered);
  std::istringstream back(ordered.str());
  const auto reread = read_ordered_csv(back, store.catalog);
  CHECK(std::equal(reread.entries().begin(), reread.entries().end(), orev.entries().begin(),
                   orev.entries().end()));
}

TEST_CASE("reconstruction residual flags a corrupted tensor") {
  const auto store = store_of(2, {{{A, B}, "30"}, {{A}, "10"}});
  const auto rev = aggregate(store);
  const auto orev = aggregate_ordered(store);
  auto entries = std::vector<OrderedRevenue::Entry>(orev.entries().begin(), orev.entries().end());
  entries.front().second += 1.0;
  const auto corrupted = OrderedRevenue::from_entries(2, entries);
  CHECK(reconstruction_residual(rev, corrupted) > 1e-3);
  entries.pop_back();
  CHECK(reconstruction_residual(rev, OrderedRevenue::from_entries(2, entries)) > 1e-3);
}
