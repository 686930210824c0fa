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

#ifndef SEQGDPP_SUBSET_HPP
#define SEQGDPP_SUBSET_HPP

#include <cstdint>
#include <vector>

#include "seqgdpp/errors.hpp"

namespace seqgdpp {

// Strictly increasing, duplicate-free indices into a ground set.
using SubsetIndex = std::vector<int>;

// Throws ArgumentError unless `y` is strictly increasing with every index in
// [0, dim).
void validate_subset(const SubsetIndex &y, int dim);

// Decodes bit `i` of `mask` into index `i`, preserving ascending order.
SubsetIndex subset_from_mask(std::uint64_t mask, int dim);

// True if `a` precedes `b` in lexicographic order on index sequences.
// ({} < {0} < {0,1} < {0,2} < {1} < ...)
bool subset_lex_less(const SubsetIndex &a, const SubsetIndex &b);

}  // namespace seqgdpp

#endif  // SEQGDPP_SUBSET_HPP
