// Copyright 2026 The seqgdpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqgdpp/subset.hpp"

#include <algorithm>
#include <string>

namespace seqgdpp {

void validate_subset(const SubsetIndex &y, int dim) {
  int prev = -1;
  for (int idx : y) {
    if (idx <= prev) {
      throw ArgumentError("subset indices must be strictly increasing, got " +
                          std::to_string(idx) + " after " +
                          std::to_string(prev));
    }
    if (idx < 0 || idx >= dim) {
      throw ArgumentError("subset index " + std::to_string(idx) +
                          " out of range for ground set of size " +
                          std::to_string(dim));
    }
    prev = idx;
  }
}

SubsetIndex subset_from_mask(std::uint64_t mask, int dim) {
  SubsetIndex y;
  for (int i = 0; i < dim; ++i) {
    if (mask & (std::uint64_t{1} << i)) y.push_back(i);
  }
  return y;
}

bool subset_lex_less(const SubsetIndex &a, const SubsetIndex &b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace seqgdpp
