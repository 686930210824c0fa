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

#include "seqgdpp/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "seqgdpp/errors.hpp"

namespace seqgdpp {

SegmentedSequence::SegmentedSequence(std::vector<std::vector<Shot>> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw IntegrityError("sequence must have at least one segment");
  }
  std::unordered_set<std::int64_t> ids;
  double prev_time = -std::numeric_limits<double>::infinity();
  feature_dim_ = -1;
  offsets_.reserve(segments_.size());
  for (std::size_t t = 0; t < segments_.size(); ++t) {
    if (segments_[t].empty()) {
      throw IntegrityError("segment " + std::to_string(t) + " is empty");
    }
    offsets_.push_back(total_);
    for (Shot &mutable_shot : segments_[t]) {
      std::sort(mutable_shot.tags.begin(), mutable_shot.tags.end());
      mutable_shot.tags.erase(
          std::unique(mutable_shot.tags.begin(), mutable_shot.tags.end()),
          mutable_shot.tags.end());
      const Shot &s = mutable_shot;
      if (!ids.insert(s.id).second) {
        throw IntegrityError("duplicate shot id " + std::to_string(s.id));
      }
      if (!std::isfinite(s.time_s) || s.time_s < prev_time) {
        throw IntegrityError("shot " + std::to_string(s.id) +
                             " breaks nondecreasing time order");
      }
      prev_time = s.time_s;
      if (s.feature.empty()) {
        throw IntegrityError("shot " + std::to_string(s.id) +
                             " has an empty feature vector");
      }
      if (feature_dim_ < 0) {
        feature_dim_ = static_cast<int>(s.feature.size());
      } else if (static_cast<int>(s.feature.size()) != feature_dim_) {
        throw IntegrityError("shot " + std::to_string(s.id) +
                             " has feature dimension " +
                             std::to_string(s.feature.size()) +
                             ", expected " + std::to_string(feature_dim_));
      }
      for (double v : s.feature) {
        if (!std::isfinite(v)) {
          throw IntegrityError("shot " + std::to_string(s.id) +
                               " has a non-finite feature value");
        }
      }
      ++total_;
    }
  }
}

const Shot &SegmentedSequence::shot(int global_index) const {
  if (global_index < 0 || global_index >= total_) {
    throw ArgumentError("shot index " + std::to_string(global_index) +
                        " out of range");
  }
  int t = static_cast<int>(offsets_.size()) - 1;
  while (offsets_[t] > global_index) --t;
  return segments_[t][global_index - offsets_[t]];
}

void validate_selection(const SegmentedSequence &seq,
                        const SelectionSequence &sel) {
  if (static_cast<int>(sel.selected.size()) != seq.num_segments()) {
    throw ArgumentError("selection covers " +
                        std::to_string(sel.selected.size()) +
                        " segments, sequence has " +
                        std::to_string(seq.num_segments()));
  }
  for (int t = 0; t < seq.num_segments(); ++t) {
    validate_subset(sel.selected[t], static_cast<int>(seq.segment(t).size()));
  }
}

int total_selected(const SelectionSequence &sel) {
  int n = 0;
  for (const SubsetIndex &x : sel.selected) n += static_cast<int>(x.size());
  return n;
}

std::vector<Shot> selected_shots(const SegmentedSequence &seq,
                                 const SelectionSequence &sel) {
  validate_selection(seq, sel);
  std::vector<Shot> out;
  for (int t = 0; t < seq.num_segments(); ++t) {
    for (int j : sel.selected[t]) out.push_back(seq.segment(t)[j]);
  }
  return out;
}

std::vector<std::int64_t> selected_ids(const SegmentedSequence &seq,
                                       const SelectionSequence &sel) {
  validate_selection(seq, sel);
  std::vector<std::int64_t> out;
  for (int t = 0; t < seq.num_segments(); ++t) {
    for (int j : sel.selected[t]) out.push_back(seq.segment(t)[j].id);
  }
  return out;
}

}  // namespace seqgdpp
