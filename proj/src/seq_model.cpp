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

#include "seqgdpp/seq_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqgdpp/dpp.hpp"
#include "seqgdpp/errors.hpp"

namespace seqgdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimplexTol = 1e-10;
constexpr double kBandwidthRatio = 1.2;

void check_segment_index(int t, int num_segments) {
  if (t < 0 || t >= num_segments) {
    throw ArgumentError("segment index " + std::to_string(t) +
                        " out of range for " + std::to_string(num_segments) +
                        " segments");
  }
}

void check_cap(int segment_size) {
  if (segment_size > kMaxExhaustiveSegment) {
    throw SegmentTooLargeError(
        "segment has " + std::to_string(segment_size) +
        " shots, beyond the exhaustive-inference cap of " +
        std::to_string(kMaxExhaustiveSegment) +
        "; re-segment the video into smaller pieces");
  }
}

}  // namespace

void validate_params(const SeqGDPPParams &params) {
  if (params.beta.empty()) {
    throw ArgumentError("params need at least one base kernel weight");
  }
  if (params.beta.size() != params.bandwidth_exponents.size()) {
    throw ArgumentError("beta has " + std::to_string(params.beta.size()) +
                        " entries for " +
                        std::to_string(params.bandwidth_exponents.size()) +
                        " bandwidth exponents");
  }
  double total = 0.0;
  for (double b : params.beta) {
    if (!std::isfinite(b) || b < 0.0) {
      throw ArgumentError("beta entries must be finite and nonnegative");
    }
    total += b;
  }
  if (std::abs(total - 1.0) > kSimplexTol) {
    throw ArgumentError("beta must sum to 1 within 1e-10, got " +
                        std::to_string(total));
  }
  if (!std::isfinite(params.alpha) || params.alpha <= 0.0) {
    throw ArgumentError("alpha must be positive");
  }
  if (params.m0 < 1) {
    throw ArgumentError("m0 must be a positive integer");
  }
  for (int i = 0; i < params.w.size(); ++i) {
    if (!std::isfinite(params.w(i))) {
      throw ArgumentError("w must be finite");
    }
  }
}

std::vector<int> default_bandwidth_exponents(int d) {
  if (d < 1) {
    throw ArgumentError("need at least one base kernel");
  }
  const int first = (d % 2 == 0) ? 1 - d / 2 : -(d - 1) / 2;
  std::vector<int> exponents(d);
  for (int i = 0; i < d; ++i) exponents[i] = first + i;
  return exponents;
}

SeqGDPPParams default_params(int d, int feature_dim, double alpha, int m0) {
  SeqGDPPParams params;
  params.beta.assign(d, 1.0 / d);
  params.w = Eigen::VectorXd::Zero(feature_dim);
  params.alpha = alpha;
  params.m0 = m0;
  params.bandwidth_exponents = default_bandwidth_exponents(d);
  validate_params(params);
  return params;
}

SequenceGeometry::SequenceGeometry(const SegmentedSequence &seq)
    : seq_(&seq) {
  const int n = seq.total_shots();
  if (n < 2) {
    throw DegenerateFeaturesError(
        "need at least two shots to derive an RBF bandwidth");
  }
  const int d = seq.feature_dim();
  Eigen::MatrixXd f(n, d);
  for (int a = 0; a < n; ++a) {
    const std::vector<double> &feat = seq.shot(a).feature;
    for (int j = 0; j < d; ++j) f(a, j) = feat[j];
  }
  sq_ = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double s = (f.row(a) - f.row(b)).squaredNorm();
      sq_(a, b) = s;
      sq_(b, a) = s;
      dists.push_back(std::sqrt(s));
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t m = dists.size();
  sigma0_ = (m % 2 == 1) ? dists[m / 2]
                         : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
  if (sigma0_ <= 0.0) {
    throw DegenerateFeaturesError(
        "median pairwise shot distance is zero; features are degenerate");
  }
}

std::vector<PSDKernel> build_base_kernels(const SequenceGeometry &geo,
                                          const SubsetIndex &x_prev, int t,
                                          const std::vector<int> &exponents) {
  const SegmentedSequence &seq = geo.seq();
  check_segment_index(t, seq.num_segments());
  if (t == 0) {
    if (!x_prev.empty()) {
      throw ArgumentError("the first segment has no previous selection");
    }
  } else {
    validate_subset(x_prev, static_cast<int>(seq.segment(t - 1).size()));
  }

  const int p = static_cast<int>(x_prev.size());
  const int nt = static_cast<int>(seq.segment(t).size());
  const int n = p + nt;
  std::vector<int> globals(n);
  for (int i = 0; i < p; ++i) {
    globals[i] = seq.segment_offset(t - 1) + x_prev[i];
  }
  for (int j = 0; j < nt; ++j) globals[p + j] = seq.segment_offset(t) + j;
  std::vector<std::int64_t> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = seq.shot(globals[i]).id;

  SubsetIndex prev_idx(p), v_idx(nt);
  for (int i = 0; i < p; ++i) prev_idx[i] = i;
  for (int j = 0; j < nt; ++j) v_idx[j] = p + j;

  std::vector<PSDKernel> omegas;
  omegas.reserve(exponents.size());
  for (int e : exponents) {
    const double sigma = std::pow(kBandwidthRatio, e) * geo.sigma0();
    const double denom = 2.0 * sigma * sigma;
    Eigen::MatrixXd l(n, n);
    for (int a = 0; a < n; ++a) {
      l(a, a) = 1.0;
      for (int b = a + 1; b < n; ++b) {
        const double v = std::exp(-geo.sq_dist(globals[a], globals[b]) / denom);
        l(a, b) = v;
        l(b, a) = v;
      }
    }
    try {
      omegas.push_back(
          condition_kernel(PSDKernel(std::move(l), ids), prev_idx, v_idx));
    } catch (const ConditioningError &err) {
      throw ConditioningError("segment " + std::to_string(t) + ": " +
                              err.what());
    }
  }
  return omegas;
}

std::vector<PSDKernel> build_base_kernels(const SegmentedSequence &seq,
                                          const SubsetIndex &x_prev, int t,
                                          int d) {
  SequenceGeometry geo(seq);
  return build_base_kernels(geo, x_prev, t, default_bandwidth_exponents(d));
}

Eigen::VectorXd segment_feature(const std::vector<Shot> &v_t) {
  if (v_t.empty()) {
    throw ArgumentError("segment feature needs at least one shot");
  }
  const int d = static_cast<int>(v_t[0].feature.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const Shot &s : v_t) {
    for (int j = 0; j < d; ++j) mean(j) += s.feature[j];
  }
  mean /= static_cast<double>(v_t.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const Shot &s : v_t) {
    for (int j = 0; j < d; ++j) {
      const double dev = s.feature[j] - mean(j);
      var(j) += dev * dev;
    }
  }
  var /= static_cast<double>(v_t.size());
  return var.cwiseSqrt();
}

double mu_t(const SeqGDPPParams &params, int t, int num_segments,
            int selected_so_far, const std::vector<Shot> &v_t) {
  check_segment_index(t, num_segments);
  const Eigen::VectorXd phi = segment_feature(v_t);
  if (params.w.size() != phi.size()) {
    throw ArgumentError("w has dimension " + std::to_string(params.w.size()) +
                        ", features have " + std::to_string(phi.size()));
  }
  const double raw =
      (params.m0 - selected_so_far) / static_cast<double>(num_segments - t) +
      params.w.dot(phi);
  return std::clamp(raw, 0.0, static_cast<double>(v_t.size()));
}

std::vector<double> size_distribution(double alpha, double mu, int n) {
  if (!(alpha > 0.0) || n < 1) {
    throw ArgumentError("size distribution needs alpha > 0 and n >= 1");
  }
  std::vector<double> logits(n + 1);
  double top = -kInf;
  for (int k = 0; k <= n; ++k) {
    logits[k] = -alpha * (k - mu) * (k - mu);
    top = std::max(top, logits[k]);
  }
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    logits[k] = std::exp(logits[k] - top);
    total += logits[k];
  }
  for (double &v : logits) v /= total;
  return logits;
}

StepKernels build_step_kernels(const SequenceGeometry &geo,
                               const SubsetIndex &x_prev, int t,
                               const std::vector<int> &exponents) {
  StepKernels step;
  step.omegas = build_base_kernels(geo, x_prev, t, exponents);
  step.segment_size = static_cast<int>(geo.seq().segment(t).size());
  step.esym.reserve(step.omegas.size());
  for (const PSDKernel &omega : step.omegas) {
    step.esym.push_back(
        elementary_symmetric(omega.eigenvalues(), step.segment_size));
  }
  return step;
}

PSDKernel mix_kernels(const std::vector<PSDKernel> &kernels,
                      const std::vector<double> &beta) {
  if (kernels.empty() || kernels.size() != beta.size()) {
    throw ArgumentError("kernel mixture needs one weight per kernel");
  }
  const int n = kernels[0].dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].dim() != n) {
      throw ArgumentError("kernel mixture needs equal-sized kernels");
    }
    m += beta[i] * kernels[i].entries();
  }
  return PSDKernel(std::move(m), kernels[0].item_ids());
}

double seqgdpp_conditional_log_prob(const SeqGDPPParams &params,
                                    const StepKernels &step, double mu,
                                    const SubsetIndex &x_t) {
  validate_params(params);
  if (params.beta.size() != step.omegas.size()) {
    throw ArgumentError("params mix " + std::to_string(params.beta.size()) +
                        " kernels, step has " +
                        std::to_string(step.omegas.size()));
  }
  const int n = step.segment_size;
  validate_subset(x_t, n);
  const int k = static_cast<int>(x_t.size());
  const std::vector<double> p = size_distribution(params.alpha, mu, n);
  if (p[k] <= 0.0) return -kInf;
  double mix = 0.0;
  for (std::size_t i = 0; i < step.omegas.size(); ++i) {
    const double ek = step.esym[i][k];
    if (ek <= 0.0 || params.beta[i] <= 0.0) continue;
    const double ld = log_det_psd(step.omegas[i].submatrix(x_t));
    if (ld == -kInf) continue;
    mix += params.beta[i] * std::exp(ld - std::log(ek));
  }
  if (mix <= 0.0) return -kInf;
  return std::log(p[k]) + std::log(mix);
}

double seqgdpp_conditional_log_prob(const SeqGDPPParams &params,
                                    const SegmentedSequence &seq, int t,
                                    const SubsetIndex &x_prev,
                                    const SubsetIndex &x_t,
                                    int selected_before) {
  SequenceGeometry geo(seq);
  const StepKernels step =
      build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
  const double mu =
      mu_t(params, t, seq.num_segments(), selected_before, seq.segment(t));
  return seqgdpp_conditional_log_prob(params, step, mu, x_t);
}

double seqdpp_conditional_log_prob(const SeqGDPPParams &params,
                                   const SegmentedSequence &seq, int t,
                                   const SubsetIndex &x_prev,
                                   const SubsetIndex &x_t) {
  SequenceGeometry geo(seq);
  const StepKernels step =
      build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
  const PSDKernel omega = mix_kernels(step.omegas, params.beta);
  validate_subset(x_t, omega.dim());
  return log_det_psd(omega.submatrix(x_t)) - log_det_plus_identity(omega);
}

double seqgdpp_log_likelihood(const SeqGDPPParams &params,
                              const SegmentedSequence &seq,
                              const SelectionSequence &oracle) {
  validate_params(params);
  validate_selection(seq, oracle);
  SequenceGeometry geo(seq);
  const SubsetIndex empty;
  double ll = 0.0;
  int selected = 0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const SubsetIndex &x_prev = (t == 0) ? empty : oracle.selected[t - 1];
    const StepKernels step =
        build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
    const double mu =
        mu_t(params, t, seq.num_segments(), selected, seq.segment(t));
    ll += seqgdpp_conditional_log_prob(params, step, mu, oracle.selected[t]);
    if (ll == -kInf) return ll;
    selected += static_cast<int>(oracle.selected[t].size());
  }
  return ll;
}

double seqdpp_log_likelihood(const SeqGDPPParams &params,
                             const SegmentedSequence &seq,
                             const SelectionSequence &oracle) {
  validate_params(params);
  validate_selection(seq, oracle);
  SequenceGeometry geo(seq);
  const SubsetIndex empty;
  double ll = 0.0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const SubsetIndex &x_prev = (t == 0) ? empty : oracle.selected[t - 1];
    const StepKernels step =
        build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
    const PSDKernel omega = mix_kernels(step.omegas, params.beta);
    ll += log_prob_ensemble(omega, oracle.selected[t]);
    if (ll == -kInf) return ll;
  }
  return ll;
}

LLGradients log_likelihood_with_gradients(ModelKind kind,
                                          const SeqGDPPParams &params,
                                          const SegmentedSequence &seq,
                                          const SelectionSequence &oracle) {
  validate_params(params);
  validate_selection(seq, oracle);
  const int d_kernels = static_cast<int>(params.beta.size());
  LLGradients out;
  out.grad_w = Eigen::VectorXd::Zero(seq.feature_dim());
  out.grad_beta.assign(d_kernels, 0.0);

  SequenceGeometry geo(seq);
  const SubsetIndex empty;
  int selected = 0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const SubsetIndex &x_prev = (t == 0) ? empty : oracle.selected[t - 1];
    const SubsetIndex &x_t = oracle.selected[t];
    const StepKernels step =
        build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
    const int n = step.segment_size;
    const int k = static_cast<int>(x_t.size());

    if (kind == ModelKind::kSeqGDPP) {
      const Eigen::VectorXd phi = segment_feature(seq.segment(t));
      const double raw = (params.m0 - selected) /
                             static_cast<double>(seq.num_segments() - t) +
                         params.w.dot(phi);
      const bool unclamped = raw > 0.0 && raw < static_cast<double>(n);
      const double mu = std::clamp(raw, 0.0, static_cast<double>(n));
      const std::vector<double> p = size_distribution(params.alpha, mu, n);
      if (p[k] <= 0.0) {
        out.ll = -kInf;
        return out;
      }
      double expected = 0.0;
      for (int j = 0; j <= n; ++j) expected += j * p[j];

      std::vector<double> comps(d_kernels, 0.0);
      double mix = 0.0;
      for (int i = 0; i < d_kernels; ++i) {
        const double ek = step.esym[i][k];
        if (ek <= 0.0) continue;
        const double ld = log_det_psd(step.omegas[i].submatrix(x_t));
        if (ld == -kInf) continue;
        comps[i] = std::exp(ld - std::log(ek));
        mix += params.beta[i] * comps[i];
      }
      if (mix <= 0.0) {
        out.ll = -kInf;
        return out;
      }
      out.ll += std::log(p[k]) + std::log(mix);
      if (unclamped) {
        out.grad_w += 2.0 * params.alpha * (k - expected) * phi;
      }
      for (int i = 0; i < d_kernels; ++i) out.grad_beta[i] += comps[i] / mix;
    } else {
      const PSDKernel omega = mix_kernels(step.omegas, params.beta);
      const Eigen::MatrixXd sub = omega.submatrix(x_t);
      const double ld_sub = log_det_psd(sub);
      if (ld_sub == -kInf) {
        out.ll = -kInf;
        return out;
      }
      out.ll += ld_sub - log_det_plus_identity(omega);

      Eigen::MatrixXd sub_inv;
      if (k > 0) sub_inv = sub.inverse();
      const Eigen::MatrixXd full_inv =
          (omega.entries() + Eigen::MatrixXd::Identity(n, n)).inverse();
      for (int i = 0; i < d_kernels; ++i) {
        double g = -(full_inv * step.omegas[i].entries()).trace();
        if (k > 0) {
          g += (sub_inv * step.omegas[i].submatrix(x_t)).trace();
        }
        out.grad_beta[i] += g;
      }
    }
    selected += k;
  }
  return out;
}

SubsetIndex greedy_step_seqdpp(const PSDKernel &omega) {
  const int n = omega.dim();
  check_cap(n);
  double best = 0.0;
  SubsetIndex best_x;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    SubsetIndex x = subset_from_mask(mask, n);
    const double score = log_det_psd(omega.submatrix(x));
    if (score > best || (score == best && subset_lex_less(x, best_x))) {
      best = score;
      best_x = std::move(x);
    }
  }
  return best_x;
}

SubsetIndex greedy_step_seqgdpp(const SeqGDPPParams &params,
                                const StepKernels &step, double mu) {
  validate_params(params);
  const int n = step.segment_size;
  check_cap(n);
  const std::vector<double> p = size_distribution(params.alpha, mu, n);
  double best = -kInf;
  SubsetIndex best_x;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    SubsetIndex x = subset_from_mask(mask, n);
    const int k = static_cast<int>(x.size());
    double score = -kInf;
    if (p[k] > 0.0) {
      double mix = 0.0;
      for (std::size_t i = 0; i < step.omegas.size(); ++i) {
        const double ek = step.esym[i][k];
        if (ek <= 0.0 || params.beta[i] <= 0.0) continue;
        const double ld = log_det_psd(step.omegas[i].submatrix(x));
        if (ld == -kInf) continue;
        mix += params.beta[i] * std::exp(ld - std::log(ek));
      }
      if (mix > 0.0) score = std::log(p[k]) + std::log(mix);
    }
    if (score > best ||
        (score == best && !best_x.empty() && subset_lex_less(x, best_x))) {
      best = score;
      best_x = std::move(x);
    }
  }
  return best_x;
}

SelectionSequence greedy_infer(ModelKind kind, const SeqGDPPParams &params,
                               const SegmentedSequence &seq) {
  validate_params(params);
  SequenceGeometry geo(seq);
  SelectionSequence out;
  SubsetIndex prev;
  int selected = 0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    check_cap(static_cast<int>(seq.segment(t).size()));
    const StepKernels step =
        build_step_kernels(geo, prev, t, params.bandwidth_exponents);
    SubsetIndex x;
    if (kind == ModelKind::kSeqDPP) {
      x = greedy_step_seqdpp(mix_kernels(step.omegas, params.beta));
    } else {
      const double mu =
          mu_t(params, t, seq.num_segments(), selected, seq.segment(t));
      x = greedy_step_seqgdpp(params, step, mu);
    }
    selected += static_cast<int>(x.size());
    prev = x;
    out.selected.push_back(std::move(x));
  }
  return out;
}

}  // namespace seqgdpp
