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

#include "attrib/shapley.hpp"

#include <bit>

#include "attrib/error.hpp"
#include "attrib/exact_sum.hpp"

namespace attrib {

namespace {

double exact_total(std::span<const double> values) {
  ExactSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

std::vector<double> finish(const std::vector<ExactSum>& sums) {
  std::vector<double> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kNaive: return "naive";
    case Method::kSimplified: return "simplified";
    case Method::kOrderedCollapsed: return "ordered-collapsed";
  }
  return "unknown";
}

OrderedAttribution::OrderedAttribution(std::size_t channels, std::size_t touchpoints)
    : p_(channels), n_(touchpoints), cells_(channels * touchpoints, 0.0) {}

OrderedAttribution::OrderedAttribution(std::size_t channels, std::size_t touchpoints,
                                       std::vector<double> cells)
    : p_(channels), n_(touchpoints), cells_(std::move(cells)) {
  if (cells_.size() != p_ * n_) {
    throw Error(ErrorKind::kPrecondition, "ordered attribution must be p x N");
  }
}

double marginal_contribution(const UtilityTable& table, ChannelId channel,
                             CoalitionKey coalition) {
  if (channel >= table.channels() || coalition.span() > table.channels()) {
    throw Error(ErrorKind::kPrecondition, "channel or coalition out of range");
  }
  if (coalition.contains(channel)) {
    throw Error(ErrorKind::kPrecondition,
                "marginal contribution needs a coalition without the channel");
  }
  return table[coalition.with(channel)] - table[coalition];
}

std::vector<double> shapley_weights(std::size_t p) {
  // |S|! (p-|S|-1)! / p! == 1 / (p * C(p-1, |S|)); the binomials are exact
  // integers in double precision for every p a dense table can hold.
  std::vector<double> weights(p);
  double binom = 1.0;
  for (std::size_t k = 0; k < p; ++k) {
    weights[k] = 1.0 / (static_cast<double>(p) * binom);
    binom = binom * static_cast<double>(p - 1 - k) / static_cast<double>(k + 1);
  }
  return weights;
}

Attribution shapley_naive(const CoalitionRevenue& rev) {
  const std::size_t p = rev.channels();
  const UtilityTable table = zeta_transform(rev);
  const auto weights = shapley_weights(p);
  const auto v = table.values();
  const std::size_t size = v.size();

  std::vector<ExactSum> phi(p);
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t s = 0; s < size; ++s) {
      if (s & bit) continue;
      const double marginal = v[s | bit] - v[s];
      if (marginal != 0.0) {
        phi[j].add(weights[static_cast<std::size_t>(std::popcount(s))] * marginal);
      }
    }
  }
  Attribution out;
  out.values = finish(phi);
  out.total = exact_total(out.values);
  out.method = Method::kNaive;
  return out;
}

double shapley_naive_direct_channel(const CoalitionRevenue& rev, ChannelId channel) {
  const std::size_t p = rev.channels();
  if (channel >= p) {
    throw Error(ErrorKind::kPrecondition, "channel out of range");
  }
  if (p >= 63) {
    throw Error(ErrorKind::kCapacity, "coalition enumeration needs p < 63");
  }
  const auto weights = shapley_weights(p);
  const std::uint64_t bit = std::uint64_t{1} << channel;
  const std::uint64_t size = std::uint64_t{1} << p;
  ExactSum phi;
  for (std::uint64_t s = 0; s < size; ++s) {
    if (s & bit) continue;
    const double marginal = utility(rev, CoalitionKey::from_bits(s | bit)) -
                            utility(rev, CoalitionKey::from_bits(s));
    if (marginal != 0.0) {
      phi.add(weights[static_cast<std::size_t>(std::popcount(s))] * marginal);
    }
  }
  return phi.value();
}

Attribution shapley_naive_direct(const CoalitionRevenue& rev) {
  Attribution out;
  out.values.resize(rev.channels());
  for (ChannelId j = 0; j < rev.channels(); ++j) {
    out.values[j] = shapley_naive_direct_channel(rev, j);
  }
  out.total = exact_total(out.values);
  out.method = Method::kNaive;
  return out;
}

Attribution shapley_simplified(const CoalitionRevenue& rev) {
  std::vector<ExactSum> phi(rev.channels());
  for (const auto& [key, value] : rev.entries()) {
    const double share = value / static_cast<double>(key.cardinality());
    key.for_each_member([&](ChannelId j) { phi[j].add(share); });
  }
  Attribution out;
  out.values = finish(phi);
  out.total = exact_total(out.values);
  out.method = Method::kSimplified;
  return out;
}

OrderedAttribution shapley_ordered(const OrderedRevenue& orev) {
  const std::size_t p = orev.channels();
  const std::size_t n = orev.max_position();
  std::vector<ExactSum> cells(p * n);
  for (const auto& [key, value] : orev.entries()) {
    cells[key.channel * n + key.position - 1].add(
        value / static_cast<double>(key.coalition.cardinality()));
  }
  return OrderedAttribution(p, n, finish(cells));
}

Attribution channel_totals(const OrderedAttribution& oa) {
  Attribution out;
  out.values.reserve(oa.channels());
  for (ChannelId j = 0; j < oa.channels(); ++j) {
    out.values.push_back(exact_total(oa.row(j)));
  }
  out.total = exact_total(oa.cells());
  out.method = Method::kOrderedCollapsed;
  return out;
}

std::vector<double> touchpoint_totals(const OrderedAttribution& oa) {
  std::vector<ExactSum> columns(oa.touchpoints());
  for (ChannelId j = 0; j < oa.channels(); ++j) {
    const auto row = oa.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) columns[i].add(row[i]);
  }
  return finish(columns);
}

double lemma_weight(int n, int n0) {
  if (n < 1 || n > 170 || n0 < 1 || n0 > n) {
    throw Error(ErrorKind::kPrecondition,
                "lemma_weight needs 1 <= n0 <= n <= 170");
  }
  if (n0 == n) return 0.0;
  // First term (k = n0): n0! (n-n0-1)! / n! = 1 / (n * C(n-1, n0)).
  double binom = 1.0;
  for (int t = 1; t <= n0; ++t) {
    binom = binom * static_cast<double>(n - 1 - n0 + t) / static_cast<double>(t);
  }
  double term = 1.0 / (static_cast<double>(n) * binom);
  ExactSum sum;
  for (int k = n0; k <= n - 1; ++k) {
    sum.add(term);
    // term(k+1) / term(k) = (k+1) / (k+1-n0)
    term = term * static_cast<double>(k + 1) / static_cast<double>(k + 1 - n0);
  }
  return sum.value();
}

}  // namespace attrib
