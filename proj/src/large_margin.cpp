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

#include "seqgdpp/large_margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "seqgdpp/dpp.hpp"
#include "seqgdpp/errors.hpp"
#include "seqgdpp/eval.hpp"

namespace seqgdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SubsetIndex merge_disjoint(const SubsetIndex &a, const SubsetIndex &b) {
  SubsetIndex out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] == out[i - 1]) {
      throw ArgumentError("subsets passed to margin_term overlap at index " +
                          std::to_string(out[i]));
    }
  }
  return out;
}

std::vector<double> softmax(const std::vector<double> &logits) {
  double top = -kInf;
  for (double v : logits) top = std::max(top, v);
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double &v : out) v /= total;
  return out;
}

// Probability components P_k(x; Omega_i) = det(Omega_i[x]) / e_k(i) for one
// subset, plus their beta-mixture.
struct MixParts {
  std::vector<double> comps;
  double mix = 0.0;
};

MixParts mixture_parts(const SeqGDPPParams &params, const StepKernels &step,
                       const SubsetIndex &x) {
  MixParts out;
  const int k = static_cast<int>(x.size());
  out.comps.assign(step.omegas.size(), 0.0);
  for (std::size_t i = 0; i < step.omegas.size(); ++i) {
    const double ek = step.esym[i][k];
    if (ek <= 0.0) continue;
    const double ld = log_det_psd(step.omegas[i].submatrix(x));
    if (ld == -kInf) continue;
    out.comps[i] = std::exp(ld - std::log(ek));
    out.mix += params.beta[i] * out.comps[i];
  }
  return out;
}

}  // namespace

double margin_term(const PSDKernel &l_t, const SubsetIndex &x_oracle,
                   const SubsetIndex &x_hat, const SubsetIndex &x_prev) {
  const SubsetIndex u_oracle = merge_disjoint(x_oracle, x_prev);
  const SubsetIndex u_hat = merge_disjoint(x_hat, x_prev);
  validate_subset(u_oracle, l_t.dim());
  validate_subset(u_hat, l_t.dim());
  const double ld_oracle = log_det_psd(l_t.submatrix(u_oracle));
  if (ld_oracle == -kInf) return kInf;
  const double ld_hat = log_det_psd(l_t.submatrix(u_hat));
  if (ld_hat == -kInf) return 0.0;
  return std::max(0.0, 1.0 - ld_oracle + ld_hat);
}

double sequence_cost(const std::vector<Shot> &candidate,
                     const std::vector<Shot> &oracle, CostKind kind) {
  if (candidate.empty() && oracle.empty()) return 0.0;
  double f1 = 0.0;
  if (kind == CostKind::kShotF1) {
    std::set<std::int64_t> a, b;
    for (const Shot &s : candidate) a.insert(s.id);
    for (const Shot &s : oracle) b.insert(s.id);
    std::size_t common = 0;
    for (std::int64_t id : a) common += b.count(id);
    if (!a.empty() && !b.empty() && common > 0) {
      const double precision = static_cast<double>(common) / a.size();
      const double recall = static_cast<double>(common) / b.size();
      f1 = 2.0 * precision * recall / (precision + recall);
    }
  } else {
    f1 = match_f1(candidate, oracle, no_filter()).f1;
  }
  return std::clamp(1.0 - f1, 0.0, 1.0);
}

LMLossResult lm_loss(ModelKind kind, const SeqGDPPParams &params,
                     const SegmentedSequence &seq,
                     const SelectionSequence &oracle, CostKind cost_kind) {
  validate_params(params);
  validate_selection(seq, oracle);
  const int d_kernels = static_cast<int>(params.beta.size());
  LMLossResult out;
  out.grad_w = Eigen::VectorXd::Zero(seq.feature_dim());
  out.grad_beta.assign(d_kernels, 0.0);

  SequenceGeometry geo(seq);
  const SubsetIndex empty;
  std::vector<Shot> oracle_prefix;
  int selected = 0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const SubsetIndex &x_prev = (t == 0) ? empty : oracle.selected[t - 1];
    const SubsetIndex &x_star = oracle.selected[t];
    const StepKernels step =
        build_step_kernels(geo, x_prev, t, params.bandwidth_exponents);
    const int n = step.segment_size;

    SubsetIndex x_hat;
    double margin = 0.0;
    double mu = 0.0;
    if (kind == ModelKind::kSeqDPP) {
      const PSDKernel omega = mix_kernels(step.omegas, params.beta);
      x_hat = greedy_step_seqdpp(omega);
      margin = margin_term(omega, x_star, x_hat, empty);
    } else {
      mu = mu_t(params, t, seq.num_segments(), selected, seq.segment(t));
      x_hat = greedy_step_seqgdpp(params, step, mu);
      const double lp_star =
          seqgdpp_conditional_log_prob(params, step, mu, x_star);
      if (lp_star == -kInf) {
        margin = kInf;
      } else {
        const double lp_hat =
            seqgdpp_conditional_log_prob(params, step, mu, x_hat);
        margin =
            lp_hat == -kInf ? 0.0 : std::max(0.0, 1.0 - lp_star + lp_hat);
      }
    }

    // delta compares the oracle prefix with x_hat swapped in at step t
    // against the oracle prefix through t.
    std::vector<Shot> cand = oracle_prefix;
    for (int j : x_hat) cand.push_back(seq.segment(t)[j]);
    std::vector<Shot> ref = oracle_prefix;
    for (int j : x_star) ref.push_back(seq.segment(t)[j]);
    const double cost = sequence_cost(cand, ref, cost_kind);

    out.loss += cost * margin;
    out.steps.push_back({t, x_star, x_hat, margin, cost});

    if (cost > 0.0 && margin > 0.0 && std::isfinite(margin)) {
      if (kind == ModelKind::kSeqDPP) {
        Eigen::MatrixXd omega =
            Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < d_kernels; ++i) {
          omega += params.beta[i] * step.omegas[i].entries();
        }
        const auto trace_term = [&](const SubsetIndex &x, double sign) {
          if (x.empty()) return;
          Eigen::MatrixXd sub(x.size(), x.size());
          for (std::size_t a = 0; a < x.size(); ++a)
            for (std::size_t b = 0; b < x.size(); ++b)
              sub(a, b) = omega(x[a], x[b]);
          const Eigen::MatrixXd sub_inv = sub.inverse();
          for (int i = 0; i < d_kernels; ++i) {
            Eigen::MatrixXd part(x.size(), x.size());
            const Eigen::MatrixXd &oi = step.omegas[i].entries();
            for (std::size_t a = 0; a < x.size(); ++a)
              for (std::size_t b = 0; b < x.size(); ++b)
                part(a, b) = oi(x[a], x[b]);
            out.grad_beta[i] += cost * sign * (sub_inv * part).trace();
          }
        };
        trace_term(x_star, -1.0);
        trace_term(x_hat, 1.0);
      } else {
        const MixParts star = mixture_parts(params, step, x_star);
        const MixParts hat = mixture_parts(params, step, x_hat);
        for (int i = 0; i < d_kernels; ++i) {
          double g = 0.0;
          if (star.mix > 0.0) g -= star.comps[i] / star.mix;
          if (hat.mix > 0.0) g += hat.comps[i] / hat.mix;
          out.grad_beta[i] += cost * g;
        }
        const double raw =
            (params.m0 - selected) /
                static_cast<double>(seq.num_segments() - t) +
            params.w.dot(segment_feature(seq.segment(t)));
        if (raw > 0.0 && raw < static_cast<double>(n)) {
          const double dk = static_cast<double>(x_hat.size()) -
                            static_cast<double>(x_star.size());
          out.grad_w += cost * 2.0 * params.alpha * dk *
                        segment_feature(seq.segment(t));
        }
      }
    }
    for (int j : x_star) oracle_prefix.push_back(seq.segment(t)[j]);
    selected += static_cast<int>(x_star.size());
  }
  return out;
}

double mean_validation_f1(ModelKind kind, const SeqGDPPParams &params,
                          const std::vector<TrainingExample> &examples) {
  if (examples.empty()) {
    throw ArgumentError("validation F1 needs at least one example");
  }
  double total = 0.0;
  for (const TrainingExample &ex : examples) {
    const SelectionSequence inferred = greedy_infer(kind, params, *ex.seq);
    const std::vector<Shot> sys = selected_shots(*ex.seq, inferred);
    double per_example = 0.0;
    int n_refs = 0;
    if (ex.users != nullptr && !ex.users->empty()) {
      for (const SelectionSequence &user : *ex.users) {
        per_example +=
            match_f1(sys, selected_shots(*ex.seq, user), no_filter()).f1;
        ++n_refs;
      }
    } else {
      per_example +=
          match_f1(sys, selected_shots(*ex.seq, *ex.oracle), no_filter()).f1;
      n_refs = 1;
    }
    total += per_example / n_refs;
  }
  return total / static_cast<double>(examples.size());
}

FittedModel lm_train(ModelKind kind,
                     const std::vector<TrainingExample> &train,
                     const std::vector<TrainingExample> &val,
                     const LMHyperparams &hp) {
  if (hp.margin_epochs < 0 || hp.margin_learning_rate <= 0.0) {
    throw ArgumentError("invalid large-margin hyperparameters");
  }
  FittedModel model = train_mle(kind, train, val, hp.mle);
  model.large_margin = true;
  const std::vector<TrainingExample> &scored = val.empty() ? train : val;

  int epoch_base = 0;
  for (const TrainRecord &r : model.records) {
    epoch_base = std::max(epoch_base, r.epoch + 1);
  }

  const int d_kernels = static_cast<int>(model.params.beta.size());
  std::vector<double> logits(d_kernels);
  for (int i = 0; i < d_kernels; ++i) {
    logits[i] = std::log(model.params.beta[i]);
  }
  Eigen::VectorXd w = model.params.w;

  SeqGDPPParams params = model.params;
  double best_f1 = mean_validation_f1(kind, params, scored);
  SeqGDPPParams best_params = params;
  model.records.push_back({epoch_base, "val", 0.0, true, best_f1});

  for (int epoch = 1; epoch <= hp.margin_epochs; ++epoch) {
    double loss = 0.0;
    Eigen::VectorXd grad_w = Eigen::VectorXd::Zero(w.size());
    std::vector<double> grad_beta(d_kernels, 0.0);
    for (const TrainingExample &ex : train) {
      const LMLossResult r =
          lm_loss(kind, params, *ex.seq, *ex.oracle, hp.cost);
      loss += r.loss;
      grad_w += r.grad_w;
      for (int i = 0; i < d_kernels; ++i) grad_beta[i] += r.grad_beta[i];
    }
    if (!std::isfinite(loss)) {
      throw TrainingDivergedError(
          "margin epoch " + std::to_string(epoch) +
          ": non-finite hinge loss (an oracle step is unreachable)");
    }

    // Step size is per example so the same rate works across corpus sizes.
    const double step =
        hp.margin_learning_rate / static_cast<double>(train.size());
    double mean_grad = 0.0;
    for (int i = 0; i < d_kernels; ++i) {
      mean_grad += params.beta[i] * grad_beta[i];
    }
    for (int i = 0; i < d_kernels; ++i) {
      logits[i] -= step * params.beta[i] * (grad_beta[i] - mean_grad);
    }
    if (kind == ModelKind::kSeqGDPP) {
      w -= step * grad_w;
    }
    params.beta = softmax(logits);
    params.w = w;

    const double f1 = mean_validation_f1(kind, params, scored);
    model.records.push_back({epoch_base + epoch, "train", loss, false, 0.0});
    model.records.push_back({epoch_base + epoch, "val", 0.0, true, f1});
    if (f1 > best_f1 + 1e-12) {
      best_f1 = f1;
      best_params = params;
    }
  }

  model.params = std::move(best_params);
  model.val_f1 = best_f1;
  return model;
}

}  // namespace seqgdpp
