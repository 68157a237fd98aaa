// Copyright 2026 The Restake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RESTAKE_SUBSETS_HPP_
#define RESTAKE_SUBSETS_HPP_

#include <bit>
#include <cstdint>
#include <vector>

namespace restake {

// Enumerates the nonempty subsets of the set bits of `universe` in canonical
// order: increasing size, then lexicographic on the sorted id list. The
// callback returns true to stop early; the function reports whether it did.
template <typename F>
bool for_each_subset(std::uint64_t universe, std::uint32_t max_size, F&& f) {
  std::vector<unsigned> elems;
  std::uint64_t m = universe;
  while (m != 0) {
    elems.push_back(static_cast<unsigned>(std::countr_zero(m)));
    m &= m - 1;
  }
  const std::uint32_t n = static_cast<std::uint32_t>(elems.size());
  const std::uint32_t cap = max_size < n ? max_size : n;
  std::vector<std::uint32_t> c;
  for (std::uint32_t k = 1; k <= cap; ++k) {
    c.resize(k);
    for (std::uint32_t i = 0; i < k; ++i) c[i] = i;
    while (true) {
      std::uint64_t subset = 0;
      for (std::uint32_t i = 0; i < k; ++i) {
        subset |= std::uint64_t(1) << elems[c[i]];
      }
      if (f(subset)) return true;
      std::int64_t i = static_cast<std::int64_t>(k) - 1;
      while (i >= 0 && c[static_cast<std::size_t>(i)] ==
                           n - k + static_cast<std::uint32_t>(i)) {
        --i;
      }
      if (i < 0) break;
      ++c[static_cast<std::size_t>(i)];
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j) {
        c[j] = c[j - 1] + 1;
      }
    }
  }
  return false;
}

}  // namespace restake

#endif  // RESTAKE_SUBSETS_HPP_
