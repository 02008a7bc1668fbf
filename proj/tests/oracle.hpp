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

// Test-only reference computations.  Nothing here calls into the engines
// under test: utilities are plain subset scans over a std::map and Shapley
// values come from explicit permutation enumeration or from the textbook
// factorial-weighted sum in long double.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "attrib/ingest.hpp"
#include "attrib/revenue.hpp"

namespace oracle {

using Game = std::map<std::uint64_t, double>;  // coalition bits -> R

inline long double utility(const Game& game, std::uint64_t coalition) {
  long double v = 0;
  for (const auto& [bits, value] : game) {
    if ((bits & ~coalition) == 0) v += value;
  }
  return v;
}

// Average marginal contribution over all p! join orders.  p <= 8.
inline std::vector<long double> shapley_by_permutations(const Game& game, int p) {
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long double> phi(p, 0);
  long double count = 0;
  do {
    std::uint64_t joined = 0;
    long double before = 0;
    for (int j : order) {
      joined |= std::uint64_t{1} << j;
      const long double after = utility(game, joined);
      phi[j] += after - before;
      before = after;
    }
    count += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& v : phi) v /= count;
  return phi;
}

inline long double factorial(int n) {
  long double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Factorial-weighted sum over every coalition without j, utilities by scan.
inline std::vector<long double> shapley_by_subsets(const Game& game, int p) {
  std::vector<long double> phi(p, 0);
  const long double pf = factorial(p);
  for (int j = 0; j < p; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << p); ++s) {
      if (s & bit) continue;
      const int size = __builtin_popcountll(s);
      const long double w = factorial(size) * factorial(p - size - 1) / pf;
      phi[j] += w * (utility(game, s | bit) - utility(game, s));
    }
  }
  return phi;
}

// Marginal contribution recomputed as the sum of R(T) over coalitions T that
// contain j and lie inside S + j.
inline long double marginal_by_containing_sets(const Game& game, int j,
                                               std::uint64_t s) {
  const std::uint64_t bit = std::uint64_t{1} << j;
  long double m = 0;
  for (const auto& [bits, value] : game) {
    if ((bits & bit) && (bits & ~(s | bit)) == 0) m += value;
  }
  return m;
}

inline attrib::CoalitionRevenue to_revenue(const Game& game, int p) {
  std::vector<attrib::CoalitionRevenue::Entry> entries;
  for (const auto& [bits, value] : game) {
    entries.emplace_back(attrib::CoalitionKey::from_bits(bits), value);
  }
  return attrib::CoalitionRevenue::from_entries(p, std::move(entries));
}

// Random sparse game: `coalitions` distinct non-empty keys over p channels.
// `integral` draws whole-number values so every partial sum is exact.
inline Game random_game(std::mt19937_64& rng, int p, int coalitions, bool integral = false) {
  Game game;
  const std::uint64_t limit = (std::uint64_t{1} << p) - 1;
  const int target = static_cast<int>(std::min<std::uint64_t>(coalitions, limit));
  std::uniform_int_distribution<std::uint64_t> key(1, limit);
  std::uniform_real_distribution<double> real(0.0, 1000.0);
  std::uniform_int_distribution<int> whole(0, 1000);
  while (static_cast<int>(game.size()) < target) {
    game[key(rng)] = integral ? whole(rng) : real(rng);
  }
  return game;
}

// Random journey store with repeated channels.
inline attrib::JourneyStore random_store(std::mt19937_64& rng, int p, int journeys,
                                         int max_length) {
  attrib::JourneyStore store;
  for (int c = 0; c < p; ++c) store.catalog.intern("c" + std::to_string(c));
  std::uniform_int_distribution<int> length(1, max_length);
  std::uniform_int_distribution<int> channel(0, p - 1);
  std::uniform_int_distribution<std::int64_t> cents(0, 100000);
  for (int n = 0; n < journeys; ++n) {
    std::vector<attrib::ChannelId> path(length(rng));
    for (auto& c : path) c = static_cast<attrib::ChannelId>(channel(rng));
    store.journeys.push_back(attrib::make_journey(
        "u" + std::to_string(n), path, attrib::Money::from_micros(cents(rng) * 10000)));
  }
  return store;
}

}  // namespace oracle
