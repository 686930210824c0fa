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

#ifndef SEQGDPP_EVAL_HPP_
#define SEQGDPP_EVAL_HPP_

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "seqgdpp/sequence.hpp"

namespace seqgdpp {

// Attenuates shot-pair similarity by the pair's timestamp distance. PI is a
// hard window (zero beyond `parameter` seconds), GAUSSIAN multiplies by
// exp(-dt^2 / (2 parameter^2)), NONE passes similarity through.
struct TemporalFilter {
  enum class Kind { kPi, kGaussian, kNone };
  Kind kind = Kind::kNone;
  double parameter = 0.0;
};

TemporalFilter pi_filter(double window_s);
TemporalFilter gaussian_filter(double sigma_s);
TemporalFilter no_filter();

// Throws ArgumentError unless parameter > 0 (NONE exempt).
void validate_filter(const TemporalFilter &filter);

// |A intersect B| / |A union B| over deduplicated tag sets; 0 when both are
// empty so unannotated shots never match.
double iou_similarity(const std::vector<std::string> &a,
                      const std::vector<std::string> &b);

double filtered_similarity(double sim, double dt_s,
                           const TemporalFilter &filter);

// Maximum-weight bipartite matching over a nonnegative weight matrix
// (Hungarian algorithm, exact). Pairs carry strictly positive weight; the
// matching is a partial injection rows -> columns.
struct Matching {
  double total_weight = 0.0;
  std::vector<std::pair<int, int>> pairs;
};

Matching max_weight_matching(const Eigen::MatrixXd &weights);

// Matching-based F1 between a system summary and one user summary. With
// total matched weight W: precision = W/|system|, recall = W/|user|. Both
// sides empty scores f1 = 1 with the degenerate flag set; exactly one empty
// side scores 0.
struct MatchResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double total_weight = 0.0;
  std::vector<std::pair<int, int>> pairs;
  bool degenerate = false;
};

MatchResult match_f1(const std::vector<Shot> &system,
                     const std::vector<Shot> &user,
                     const TemporalFilter &filter);

// AUC horizon in seconds; curves integrate from 0 to here.
inline constexpr double kAucHorizonS = 60.0;

// Mean-F1 curve over a filter-parameter grid, plus the unfiltered value
// (the appended infinity point, excluded from the AUC). auc_raw is the
// trapezoidal area over [0, kAucHorizonS] with the curve's first value
// carried back to 0 s and the last value carried flat to the horizon; auc
// is auc_raw normalized by the horizon.
struct EvalCurve {
  std::vector<double> grid;
  std::vector<double> f1_mean;
  std::vector<std::vector<double>> f1_user;
  double f1_unfiltered = 0.0;
  double auc_raw = 0.0;
  double auc = 0.0;
};

EvalCurve evaluate_summary(const std::vector<Shot> &system,
                           const std::vector<std::vector<Shot>> &users,
                           const std::vector<double> &grid,
                           TemporalFilter::Kind kind);

// {5, 10, ..., 60} seconds.
std::vector<double> default_filter_grid();

// CSV rows param_s,f1_mean,f1_user1..k; the unfiltered point is the final
// row with parameter "inf".
std::string curve_to_csv(const EvalCurve &curve);

// Greedy oracle aggregation: starting empty, repeatedly add the video shot
// that maximizes the mean unfiltered match F1 against all user summaries;
// stop when no addition improves it. Ties prefer the lowest shot id.
SelectionSequence aggregate_oracle(const SegmentedSequence &seq,
                                   const std::vector<SelectionSequence> &users);

}  // namespace seqgdpp

#endif  // SEQGDPP_EVAL_HPP_
