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

#include <cmath>
#include <numeric>
#include <random>

#include "attrib/error.hpp"
#include "attrib/shapley.hpp"
#include "oracle.hpp"

using namespace attrib;

namespace {

constexpr ChannelId A = 0, B = 1;

CoalitionRevenue rev_of(std::size_t p, std::vector<std::pair<std::uint64_t, double>> rows) {
  std::vector<CoalitionRevenue::Entry> entries;
  for (auto [bits, v] : rows) entries.emplace_back(CoalitionKey::from_bits(bits), v);
  return CoalitionRevenue::from_entries(p, std::move(entries));
}

JourneyStore single(std::vector<ChannelId> path, const char* revenue, std::size_t p = 2) {
  JourneyStore store;
  for (std::size_t c = 0; c < p; ++c) store.catalog.intern(std::string(1, char('A' + c)));
  store.journeys.push_back(make_journey("u", path, Money::parse(revenue)));
  return store;
}

double max_rel(const std::vector<double>& a, const std::vector<long double>& b, double total) {
  double worst = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, static_cast<double>(std::fabs(a[j] - b[j])) / total);
  }
  return worst;
}

// Relabels channel j as perm[j].
oracle::Game permute(const oracle::Game& game, const std::vector<int>& perm) {
  oracle::Game out;
  for (const auto& [bits, value] : game) {
    std::uint64_t moved = 0;
    for (std::size_t j = 0; j < perm.size(); ++j) {
      if ((bits >> j) & 1u) moved |= std::uint64_t{1} << perm[j];
    }
    out[moved] = value;
  }
  return out;
}

}  // namespace

TEST_CASE("marginal contribution examples") {
  const auto table = zeta_transform(rev_of(3, {{0b01, 10}, {0b10, 20}, {0b11, 30}}));
  CHECK(marginal_contribution(table, A, CoalitionKey{}) == 10.0);
  CHECK(marginal_contribution(table, A, CoalitionKey::from_bits(0b10)) == 40.0);
  for (std::uint64_t s = 0; s < 4; ++s) {
    CHECK(marginal_contribution(table, 2, CoalitionKey::from_bits(s)) == 0.0);
  }
  CHECK_THROWS_AS(marginal_contribution(table, A, CoalitionKey::from_bits(0b01)), Error);
}

TEST_CASE("marginal contribution equals the sum over containing coalitions") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 7);
    const auto game = oracle::random_game(rng, p, 30, true);
    const auto table = zeta_transform(oracle::to_revenue(game, p));
    for (int j = 0; j < p; ++j) {
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << p); ++s) {
        if ((s >> j) & 1u) continue;
        const double m =
            marginal_contribution(table, static_cast<ChannelId>(j), CoalitionKey::from_bits(s));
        CHECK(m >= 0.0);
        CHECK(static_cast<long double>(m) == oracle::marginal_by_containing_sets(game, j, s));
      }
    }
  }
}

TEST_CASE("shapley weights") {
  const auto w = shapley_weights(3);
  CHECK(w[0] == doctest::Approx(1.0 / 3));
  CHECK(w[1] == doctest::Approx(1.0 / 6));
  CHECK(w[2] == doctest::Approx(1.0 / 3));
  for (int p = 1; p <= 24; ++p) {
    const auto weights = shapley_weights(p);
    for (int k = 0; k < p; ++k) {
      const long double expect =
          oracle::factorial(k) * oracle::factorial(p - k - 1) / oracle::factorial(p);
      CHECK(std::fabs(weights[k] - expect) / expect < 1e-14);
    }
  }
}

TEST_CASE("naive engine examples") {
  const auto phi = shapley_naive(rev_of(2, {{0b01, 10}, {0b10, 20}, {0b11, 30}}));
  CHECK(phi.values == std::vector<double>{25, 35});
  CHECK(phi.total == 60);
  CHECK(phi.method == Method::kNaive);

  CHECK(shapley_naive(rev_of(1, {{0b1, 100}})).values == std::vector<double>{100});
  CHECK(shapley_naive(rev_of(2, {{0b01, 5}, {0b10, 5}, {0b11, 8}})).values ==
        std::vector<double>{9, 9});
  CHECK_THROWS_AS(shapley_naive(CoalitionRevenue(25)), Error);
}

TEST_CASE("simplified engine examples") {
  // R{A}=6, R{A,B}=4, R{A,C}=2, R{A,B,C}=3
  const auto phi =
      shapley_simplified(rev_of(3, {{0b001, 6}, {0b011, 4}, {0b101, 2}, {0b111, 3}}));
  CHECK(phi.values[0] == 10.0);
  CHECK(phi.values[1] == 3.0);
  CHECK(phi.values[2] == 2.0);

  CHECK(shapley_simplified(rev_of(2, {{0b01, 10}, {0b10, 20}, {0b11, 30}})).values ==
        std::vector<double>{25, 35});
  CHECK(shapley_simplified(CoalitionRevenue(4)).values == std::vector<double>(4, 0.0));
}

TEST_CASE("engines match the permutation oracle") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const int p = 1 + static_cast<int>(rng() % 7);
    const auto game = oracle::random_game(rng, p, 1 + static_cast<int>(rng() % 40));
    const auto rev = oracle::to_revenue(game, p);
    const auto expect = oracle::shapley_by_permutations(game, p);
    CHECK(max_rel(shapley_naive(rev).values, expect, rev.total()) <= 1e-12);
    CHECK(max_rel(shapley_simplified(rev).values, expect, rev.total()) <= 1e-12);
    CHECK(max_rel(shapley_naive_direct(rev).values, expect, rev.total()) <= 1e-12);
  }
}

TEST_CASE("naive engine matches the factorial-weighted oracle up to p = 10") {
  std::mt19937_64 rng(33);
  for (int p = 8; p <= 10; ++p) {
    const auto game = oracle::random_game(rng, p, 120);
    const auto rev = oracle::to_revenue(game, p);
    CHECK(max_rel(shapley_naive(rev).values, oracle::shapley_by_subsets(game, p), rev.total()) <=
          1e-12);
  }
}

TEST_CASE("Shapley properties on random games") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 9);
    auto game = oracle::random_game(rng, p, 1 + static_cast<int>(rng() % 80), true);
    // Keep the last channel out of every coalition: a dummy.
    const std::uint64_t dummy_bit = std::uint64_t{1} << (p - 1);
    oracle::Game trimmed;
    for (auto [bits, v] : game) {
      if (bits & ~dummy_bit) trimmed[bits & ~dummy_bit] += v;
    }
    game = trimmed;
    const auto rev = oracle::to_revenue(game, p);
    const auto naive = shapley_naive(rev);
    const auto simplified = shapley_simplified(rev);

    for (const auto* a : {&naive, &simplified}) {
      CHECK(std::fabs(a->total - rev.total()) <= 1e-9 * rev.total());
      CHECK(a->values[p - 1] == 0.0);
      for (double v : a->values) CHECK(v >= 0.0);
    }

    // Relabeling channels permutes the result exactly.
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto moved = oracle::to_revenue(permute(game, perm), p);
    const auto naive_moved = shapley_naive(moved);
    const auto simplified_moved = shapley_simplified(moved);
    for (int j = 0; j < p; ++j) {
      CHECK(simplified_moved.values[perm[j]] == simplified.values[j]);
      CHECK(naive_moved.values[perm[j]] == naive.values[j]);
    }

    // Scaling every value scales every credit.
    oracle::Game scaled;
    for (auto [bits, v] : game) scaled[bits] = 3 * v;
    const auto triple = shapley_simplified(oracle::to_revenue(scaled, p));
    for (int j = 0; j < p; ++j) {
      CHECK(triple.values[j] == doctest::Approx(3 * simplified.values[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-channel contribution goes entirely to that channel") {
  const auto phi = shapley_simplified(rev_of(3, {{0b001, 42}, {0b110, 8}}));
  CHECK(phi.values[0] == 42.0);
  const auto naive = shapley_naive(rev_of(3, {{0b001, 42}, {0b110, 8}}));
  CHECK(naive.values[0] == doctest::Approx(42.0).epsilon(1e-14));
}

TEST_CASE("ordered engine examples") {
  const auto ab = shapley_ordered(aggregate_ordered(single({A, B}, "30")));
  CHECK(ab.touchpoints() == 2);
  CHECK(ab.at(A, 1) == 15.0);
  CHECK(ab.at(B, 2) == 15.0);
  CHECK(ab.at(A, 2) == 0.0);
  CHECK(ab.at(B, 1) == 0.0);
  CHECK(channel_totals(ab).values == std::vector<double>{15, 15});
  CHECK(channel_totals(ab).method == Method::kOrderedCollapsed);
  CHECK(touchpoint_totals(ab) == std::vector<double>{15, 15});

  const auto aab = shapley_ordered(aggregate_ordered(single({A, A, B}, "12")));
  CHECK(aab.at(A, 1) == 3.0);
  CHECK(aab.at(A, 2) == 3.0);
  CHECK(aab.at(B, 3) == 6.0);
  CHECK(channel_totals(aab).values == std::vector<double>{6, 6});
  CHECK(touchpoint_totals(aab) == std::vector<double>{3, 3, 6});
  CHECK(channel_totals(aab).values == shapley_simplified(aggregate(single({A, A, B}, "12"))).values);

  const auto a = shapley_ordered(aggregate_ordered(single({A}, "100", 1)));
  CHECK(a.at(A, 1) == 100.0);
  CHECK(touchpoint_totals(a) == std::vector<double>{100});

  const OrderedAttribution zero(3, 4);
  CHECK(channel_totals(zero).values == std::vector<double>(3, 0.0));
}

TEST_CASE("ordered engine collapses to the simplified engine") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const auto store = oracle::random_store(rng, 2 + static_cast<int>(rng() % 8), 300, 10);
    const auto simplified = shapley_simplified(aggregate(store));
    const auto oa = shapley_ordered(aggregate_ordered(store));
    const auto collapsed = channel_totals(oa);
    for (std::size_t j = 0; j < simplified.values.size(); ++j) {
      CHECK(std::fabs(collapsed.values[j] - simplified.values[j]) <= 1e-9 * simplified.total);
    }
    const auto columns = touchpoint_totals(oa);
    CHECK(std::accumulate(columns.begin(), columns.end(), 0.0) ==
          doctest::Approx(simplified.total).epsilon(1e-12));
  }
}

TEST_CASE("lemma weight") {
  CHECK(lemma_weight(3, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lemma_weight(2, 1) == 0.5);
  CHECK(lemma_weight(4, 4) == 0.0);
  for (int n = 2; n <= 170; ++n) {
    for (int n0 = 1; n0 < n; ++n0) {
      const double expect = 1.0 / (n0 + 1);
      CHECK(std::fabs(lemma_weight(n, n0) - expect) <= 1e-12 * expect);
    }
  }
  CHECK_THROWS_AS(lemma_weight(0, 1), Error);
  CHECK_THROWS_AS(lemma_weight(3, 4), Error);
  CHECK_THROWS_AS(lemma_weight(171, 1), Error);
}
