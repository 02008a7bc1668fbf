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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "attrib/model.hpp"
#include "attrib/revenue.hpp"

namespace attrib {

enum class Method { kNaive, kSimplified, kOrderedCollapsed };

std::string_view to_string(Method method);

/// Per-channel credit phi_j, indexed by channel ordinal.
struct Attribution {
  std::vector<double> values;
  double total = 0.0;  // sum of values
  Method method = Method::kSimplified;
};

/// Per-channel, per-touchpoint credit phi_j^i for positions 1..N.
class OrderedAttribution {
 public:
  OrderedAttribution(std::size_t channels, std::size_t touchpoints);
  OrderedAttribution(std::size_t channels, std::size_t touchpoints,
                     std::vector<double> cells);

  std::size_t channels() const { return p_; }
  std::size_t touchpoints() const { return n_; }
  /// `position` is 1-based.
  double at(ChannelId channel, std::size_t position) const {
    return cells_[channel * n_ + position - 1];
  }
  std::span<const double> row(ChannelId channel) const {
    return std::span<const double>(cells_).subspan(channel * n_, n_);
  }
  std::span<const double> cells() const { return cells_; }

 private:
  std::size_t p_;
  std::size_t n_;
  std::vector<double> cells_;  // row-major p x N
};

/// M(j, S) = v(S + j) - v(S).  Throws kPrecondition when j is in S or out
/// of range.
double marginal_contribution(const UtilityTable& table, ChannelId channel,
                             CoalitionKey coalition);

/// |S|! (p-|S|-1)! / p! for |S| = 0..p-1.
std::vector<double> shapley_weights(std::size_t p);

/// Permutation-weighted average of marginal contributions over all 2^(p-1)
/// coalitions per channel, on a zeta-transformed utility table.  Reference
/// engine; O(p 2^p) time and 2^p memory.  Throws kCapacity for p > 24.
Attribution shapley_naive(const CoalitionRevenue& rev);

/// phi_j by the same weighted sum, but with every v(S) evaluated by a direct
/// scan of the stored coalitions (no table).  O(2^p |entries|) per channel;
/// exists to measure what the closed form saves.
double shapley_naive_direct_channel(const CoalitionRevenue& rev, ChannelId channel);
Attribution shapley_naive_direct(const CoalitionRevenue& rev);

/// Closed form: each observed coalition T splits R(T) evenly among its
/// members.  O(sum |T|) over stored entries; no 2^p dependence.
Attribution shapley_simplified(const CoalitionRevenue& rev);

/// phi_j^i = sum over stored (T, j, i) of R^i(T, j) / |T|.
OrderedAttribution shapley_ordered(const OrderedRevenue& orev);

/// Row sums phi_j = sum_i phi_j^i.
Attribution channel_totals(const OrderedAttribution& oa);

/// Column sums phi^i = sum_j phi_j^i, i = 1..N.
std::vector<double> touchpoint_totals(const OrderedAttribution& oa);

/// sum_{k=n0}^{n-1} k! (n-n0-1)! / (n! (k-n0)!), evaluated term by term with
/// running products.  Equals 1/(n0+1) for 1 <= n0 < n; the range is empty
/// (result 0) when n0 == n.  Throws kPrecondition unless
/// 1 <= n0 <= n <= 170.
double lemma_weight(int n, int n0);

}  // namespace attrib
