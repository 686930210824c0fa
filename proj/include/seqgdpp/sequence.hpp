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

#ifndef SEQGDPP_SEQUENCE_HPP_
#define SEQGDPP_SEQUENCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "seqgdpp/subset.hpp"

namespace seqgdpp {

// One video shot: identifier, midpoint timestamp, feature vector, and a set
// of concept tags (kept sorted and duplicate-free).
struct Shot {
  std::int64_t id = 0;
  double time_s = 0.0;
  std::vector<double> feature;
  std::vector<std::string> tags;
};

// A video divided into T consecutive, disjoint, nonempty segments. Shot ids
// are unique, timestamps nondecreasing in flattened order, and the feature
// dimension is uniform.
class SegmentedSequence {
 public:
  explicit SegmentedSequence(std::vector<std::vector<Shot>> segments);

  int num_segments() const { return static_cast<int>(segments_.size()); }
  const std::vector<Shot> &segment(int t) const { return segments_[t]; }
  const std::vector<std::vector<Shot>> &segments() const { return segments_; }
  int total_shots() const { return total_; }
  int feature_dim() const { return feature_dim_; }

  // Global index of the first shot of segment t in flattened order.
  int segment_offset(int t) const { return offsets_[t]; }
  const Shot &shot(int global_index) const;

 private:
  std::vector<std::vector<Shot>> segments_;
  std::vector<int> offsets_;
  int total_ = 0;
  int feature_dim_ = 0;
};

// Per-segment selections, stored as local indices into each segment's shot
// list. selected.size() must equal the sequence's segment count; empty
// subsets are allowed.
struct SelectionSequence {
  std::vector<SubsetIndex> selected;
};

// Throws ArgumentError unless sel has one valid subset per segment of seq.
void validate_selection(const SegmentedSequence &seq,
                        const SelectionSequence &sel);

int total_selected(const SelectionSequence &sel);

// Selected shots in flattened (temporal) order.
std::vector<Shot> selected_shots(const SegmentedSequence &seq,
                                 const SelectionSequence &sel);

std::vector<std::int64_t> selected_ids(const SegmentedSequence &seq,
                                       const SelectionSequence &sel);

}  // namespace seqgdpp

#endif  // SEQGDPP_SEQUENCE_HPP_
