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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace attrib {

// Splits [0, n) into `threads` contiguous chunks, folds each chunk on its
// own thread with fold_chunk(begin, end) -> Partial, then merges partials
// left to right in chunk order with merge(Partial& into, Partial&& from).
// Deterministic whenever merge is associative on the partial type.
template <typename Partial, typename FoldChunk, typename Merge>
Partial partitioned_fold(std::size_t n, unsigned threads, FoldChunk fold_chunk,
                         Merge merge) {
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) return fold_chunk(std::size_t{0}, n);

  std::vector<Partial> partials(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        partials[w] = fold_chunk(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Partial result = std::move(partials[0]);
  for (std::size_t w = 1; w < workers; ++w) merge(result, std::move(partials[w]));
  return result;
}

}  // namespace attrib
