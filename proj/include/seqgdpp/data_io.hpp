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

#ifndef SEQGDPP_DATA_IO_HPP_
#define SEQGDPP_DATA_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seqgdpp/kernel.hpp"
#include "seqgdpp/sequence.hpp"

namespace seqgdpp {

struct VideoEntry {
  std::string video_id;
  SegmentedSequence seq;
  std::vector<SelectionSequence> user_summaries;
  std::optional<SelectionSequence> oracle;
};

// Loaded datasets are immutable; all invariants (unique shot ids per video,
// summaries referencing existing shots, uniform feature dimension) are
// checked eagerly at load time.
struct Dataset {
  std::vector<VideoEntry> videos;

  int feature_dim() const;
  const VideoEntry &video_by_id(const std::string &video_id) const;
};

// `path` is a dataset directory containing index.json, or the index file
// itself. Errors carry the offending file and field.
Dataset load_dataset(const std::string &path);

// Writes index.json plus one <video_id>.json per video into `dir` (created
// if missing). With use_sidecar, features go to <video_id>.bin and the JSON
// references it. Output is canonical: save(load(x)) is byte-identical.
void save_dataset(const Dataset &dataset, const std::string &dir,
                  bool use_sidecar = false);

// Binary feature sidecar: magic "GDPPFEAT", u32 count, u32 dim, then
// row-major little-endian float64.
void write_feature_sidecar(const std::string &path,
                           const Eigen::MatrixXd &features);
Eigen::MatrixXd read_feature_sidecar(const std::string &path);

// Cuts a flat shot list into segments of m shots (last segment may be
// shorter). Throws ArgumentError for m < 1 or an empty list.
std::vector<std::vector<Shot>> segment_every(const std::vector<Shot> &shots,
                                             int m = 10);

// Synthetic corpus: each video is a hidden sequence of event clusters.
// The T*m shots are partitioned into n_events contiguous runs; every shot
// carries its run's event mean (plus N(0, sigma_n^2) noise per dimension)
// and the event label as a tag. Ground truth selects the first shot of each
// run; each simulated user perturbs it by replacing a pick with another shot
// of the same run (p_replace) or adding one (p_add), so every event stays
// covered. The stored oracle is the greedy aggregate of the users.
struct SynthConfig {
  int n_videos = 12;
  int num_segments = 8;
  int segment_size = 6;
  int feature_dim = 8;
  int n_events = 16;
  double sigma_n = 0.0;
  std::uint64_t seed = 13;
  int n_users = 3;
  double p_replace = 0.1;
  // Off by default: with sigma_n = 0 an added shot duplicates its run
  // neighbor's features exactly, and an oracle containing the pair has
  // probability zero under any RBF kernel (training conditions on it).
  double p_add = 0.0;
  // Extra tags: p_scene_tag marks whole runs with a second label shared by
  // all their shots; p_noise_tag marks individual shots. Both keep the IoU
  // weights off the trivial {0,1} lattice.
  double p_scene_tag = 0.5;
  double p_noise_tag = 0.05;
  double shot_spacing_s = 5.0;
};

Dataset generate_synthetic(const SynthConfig &config);

// Leave-one-out split: fold i tests on video i and validates on videos
// (i+1) mod n and (i+2) mod n. Video ids, not indices.
struct SplitPlan {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// One fold per video; throws InsufficientDataError below 4 videos.
std::vector<SplitPlan> make_splits(const Dataset &dataset);

// Shots at global indices round(i*N/target_length), i = 0..target_length-1,
// mapped back into segments.
SelectionSequence uniform_baseline(const SegmentedSequence &seq,
                                   int target_length);

// Kernel fixtures for the sampling and verification commands:
// {"format_version": 1, "dim", "item_ids", "entries": [[row], ...]}.
PSDKernel load_kernel_json(const std::string &path);
void save_kernel_json(const PSDKernel &kernel, const std::string &path);

}  // namespace seqgdpp

#endif  // SEQGDPP_DATA_IO_HPP_
