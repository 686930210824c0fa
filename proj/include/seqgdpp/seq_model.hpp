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

#ifndef SEQGDPP_SEQ_MODEL_HPP_
#define SEQGDPP_SEQ_MODEL_HPP_

#include <Eigen/Dense>
#include <vector>

#include "seqgdpp/kernel.hpp"
#include "seqgdpp/sequence.hpp"
#include "seqgdpp/subset.hpp"

namespace seqgdpp {

enum class ModelKind { kSeqDPP, kSeqGDPP };

// Largest segment for which per-step inference enumerates all subsets
// exactly (4096 candidates); larger segments must be re-cut upstream.
inline constexpr int kMaxExhaustiveSegment = 12;

// Parameters shared by SeqDPP and SeqGDPP. beta mixes the D base kernels
// (simplex within 1e-10); w, alpha, and m0 drive the SeqGDPP size
// distribution and are ignored by SeqDPP. bandwidth_exponents k give the
// RBF bandwidths sigma_i = 1.2^k * sigma0.
struct SeqGDPPParams {
  std::vector<double> beta;
  Eigen::VectorXd w;
  double alpha = 1.0;
  int m0 = 1;
  std::vector<int> bandwidth_exponents;
};

// Throws ArgumentError on any violated invariant (beta off the simplex,
// alpha <= 0, m0 < 1, beta/exponent length mismatch).
void validate_params(const SeqGDPPParams &params);

// Exponent ladder centered on 0: {-4..5} for d = 10, {0} for d = 1.
std::vector<int> default_bandwidth_exponents(int d);

// Uniform beta, zero w, and the default exponent ladder.
SeqGDPPParams default_params(int d, int feature_dim, double alpha, int m0);

// Pairwise shot geometry of one video, shared by every step's kernel
// construction: squared feature distances by global shot index and the RBF
// base bandwidth sigma0 (median pairwise distance over all shots). Holds a
// reference to the sequence, which must outlive it.
class SequenceGeometry {
 public:
  explicit SequenceGeometry(const SegmentedSequence &seq);

  const SegmentedSequence &seq() const { return *seq_; }
  double sigma0() const { return sigma0_; }
  double sq_dist(int a, int b) const { return sq_(a, b); }

 private:
  const SegmentedSequence *seq_;
  Eigen::MatrixXd sq_;
  double sigma0_;
};

// D conditioned base kernels Omega^{t(i)} for segment t given the previous
// segment's selection x_prev (local indices into segment t-1; empty when
// t = 0). Each RBF kernel exp(-||f_a - f_b||^2 / (2 sigma_i^2)) is built
// over x_prev's shots plus all of segment t, then conditioned on x_prev.
std::vector<PSDKernel> build_base_kernels(const SequenceGeometry &geo,
                                          const SubsetIndex &x_prev, int t,
                                          const std::vector<int> &exponents);

// Convenience overload computing the geometry internally; d kernels with
// the default exponent ladder.
std::vector<PSDKernel> build_base_kernels(const SegmentedSequence &seq,
                                          const SubsetIndex &x_prev, int t,
                                          int d);

// Per-dimension population standard deviation of the segment's features;
// zero vector for singletons.
Eigen::VectorXd segment_feature(const std::vector<Shot> &v_t);

// mu^t = (m0 - selected_so_far) / (T - t) + w . phi(V_t), hard-clamped to
// [0, |V_t|]. t is 0-based, so T - t counts the remaining segments.
double mu_t(const SeqGDPPParams &params, int t, int num_segments,
            int selected_so_far, const std::vector<Shot> &v_t);

// p_k proportional to exp(-alpha (k - mu)^2) over k = 0..n, normalized.
// Entries underflow to exact zero for extreme alpha.
std::vector<double> size_distribution(double alpha, double mu, int n);

// One step's conditioned kernels plus each kernel's elementary symmetric
// polynomials, the constants every probability query at this step reuses.
struct StepKernels {
  std::vector<PSDKernel> omegas;
  std::vector<std::vector<double>> esym;
  int segment_size = 0;
};

StepKernels build_step_kernels(const SequenceGeometry &geo,
                               const SubsetIndex &x_prev, int t,
                               const std::vector<int> &exponents);

// Convex combination sum_i beta_i kernels[i].
PSDKernel mix_kernels(const std::vector<PSDKernel> &kernels,
                      const std::vector<double> &beta);

// log[ p^t_{|x_t|} * sum_i beta_i det(Omega^{t(i)}_{x_t}) / e_{|x_t|} ].
// -inf when the size weight or every mixture component vanishes.
double seqgdpp_conditional_log_prob(const SeqGDPPParams &params,
                                    const StepKernels &step, double mu,
                                    const SubsetIndex &x_t);

// Convenience overload building geometry, kernels, and mu from scratch.
// selected_before is the number of shots selected in segments before t,
// needed by the size rule.
double seqgdpp_conditional_log_prob(const SeqGDPPParams &params,
                                    const SegmentedSequence &seq, int t,
                                    const SubsetIndex &x_prev,
                                    const SubsetIndex &x_t,
                                    int selected_before);

// SeqDPP step conditional, log det(Omega_{x_t}) - log det(Omega + I) with
// the mixed kernel. Builds geometry and kernels from scratch.
double seqdpp_conditional_log_prob(const SeqGDPPParams &params,
                                   const SegmentedSequence &seq, int t,
                                   const SubsetIndex &x_prev,
                                   const SubsetIndex &x_t);

// Teacher-forced log-likelihood: sum over t of the conditional log-prob of
// oracle's step-t subset given the oracle's step-(t-1) subset.
double seqgdpp_log_likelihood(const SeqGDPPParams &params,
                              const SegmentedSequence &seq,
                              const SelectionSequence &oracle);

// SeqDPP baseline: each step is a plain conditional DPP with the single
// mixed kernel Omega^t = sum_i beta_i Omega^{t(i)}; log-prob per step is
// log det(Omega^t_{x_t}) - log det(Omega^t + I).
double seqdpp_log_likelihood(const SeqGDPPParams &params,
                             const SegmentedSequence &seq,
                             const SelectionSequence &oracle);

// Teacher-forced log-likelihood and its gradients in the free coordinates
// (w, beta), before any simplex reparameterization. grad_w is zero for
// SeqDPP, which has no size rule.
struct LLGradients {
  double ll = 0.0;
  Eigen::VectorXd grad_w;
  std::vector<double> grad_beta;
};

LLGradients log_likelihood_with_gradients(ModelKind kind,
                                          const SeqGDPPParams &params,
                                          const SegmentedSequence &seq,
                                          const SelectionSequence &oracle);

// Exact per-step argmax over all subsets of V_t, ties broken toward the
// lexicographically smallest subset. Scores: det(Omega_x) for SeqDPP,
// p_k * mixture for SeqGDPP.
SubsetIndex greedy_step_seqdpp(const PSDKernel &omega);
SubsetIndex greedy_step_seqgdpp(const SeqGDPPParams &params,
                                const StepKernels &step, double mu);

// Online sequential inference: each step conditions on the previous step's
// own selection. Throws SegmentTooLargeError past kMaxExhaustiveSegment.
SelectionSequence greedy_infer(ModelKind kind, const SeqGDPPParams &params,
                               const SegmentedSequence &seq);

}  // namespace seqgdpp

#endif  // SEQGDPP_SEQ_MODEL_HPP_
