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

#include "seqgdpp/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqgdpp/dpp.hpp"
#include "seqgdpp/errors.hpp"

namespace seqgdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kImproveTol = 1e-9;

// Teacher-forced per-step constants that do not depend on (w, beta, alpha):
// the conditioned kernels, the oracle subset's per-kernel probability
// components, and the size-rule inputs.
struct StepConstants {
  int n = 0;
  int k = 0;
  double base = 0.0;
  Eigen::VectorXd phi;
  std::vector<double> comps;
  StepKernels kernels;
  SubsetIndex x;
};

struct ExampleConstants {
  std::vector<StepConstants> steps;
};

struct BatchEval {
  double ll = 0.0;
  Eigen::VectorXd grad_w;
  std::vector<double> grad_beta;
};

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

Eigen::MatrixXd dense_submatrix(const Eigen::MatrixXd &m,
                                const SubsetIndex &y) {
  Eigen::MatrixXd out(y.size(), y.size());
  for (std::size_t a = 0; a < y.size(); ++a) {
    for (std::size_t b = 0; b < y.size(); ++b) out(a, b) = m(y[a], y[b]);
  }
  return out;
}

ExampleConstants precompute_example(ModelKind kind,
                                    const TrainingExample &ex, int m0,
                                    const std::vector<int> &exponents) {
  const SegmentedSequence &seq = *ex.seq;
  const SelectionSequence &oracle = *ex.oracle;
  validate_selection(seq, oracle);
  SequenceGeometry geo(seq);
  ExampleConstants out;
  const SubsetIndex empty;
  int selected = 0;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const SubsetIndex &x_prev = (t == 0) ? empty : oracle.selected[t - 1];
    StepConstants sc;
    sc.kernels = build_step_kernels(geo, x_prev, t, exponents);
    sc.x = oracle.selected[t];
    sc.n = sc.kernels.segment_size;
    sc.k = static_cast<int>(sc.x.size());
    sc.base = (m0 - selected) /
              static_cast<double>(seq.num_segments() - t);
    sc.phi = segment_feature(seq.segment(t));
    if (kind == ModelKind::kSeqGDPP) {
      sc.comps.assign(sc.kernels.omegas.size(), 0.0);
      for (std::size_t i = 0; i < sc.kernels.omegas.size(); ++i) {
        const double ek = sc.kernels.esym[i][sc.k];
        if (ek <= 0.0) continue;
        const double ld =
            log_det_psd(sc.kernels.omegas[i].submatrix(sc.x));
        if (ld == -kInf) continue;
        sc.comps[i] = std::exp(ld - std::log(ek));
      }
    }
    selected += sc.k;
    out.steps.push_back(std::move(sc));
  }
  return out;
}

[[noreturn]] void diverged(const std::string &split, int epoch, int example,
                           int t, const std::string &what) {
  throw TrainingDivergedError("epoch " + std::to_string(epoch) + ", " +
                              split + " example " + std::to_string(example) +
                              ", step " + std::to_string(t) + ": " + what);
}

BatchEval eval_batch(ModelKind kind,
                     const std::vector<ExampleConstants> &batch,
                     const SeqGDPPParams &params, bool want_grads,
                     const std::string &split, int epoch) {
  const int d_kernels = static_cast<int>(params.beta.size());
  BatchEval out;
  out.grad_w = Eigen::VectorXd::Zero(params.w.size());
  out.grad_beta.assign(d_kernels, 0.0);

  for (std::size_t e = 0; e < batch.size(); ++e) {
    for (std::size_t t = 0; t < batch[e].steps.size(); ++t) {
      const StepConstants &sc = batch[e].steps[t];
      if (kind == ModelKind::kSeqGDPP) {
        const double raw = sc.base + params.w.dot(sc.phi);
        const bool unclamped = raw > 0.0 && raw < static_cast<double>(sc.n);
        const double mu = std::clamp(raw, 0.0, static_cast<double>(sc.n));
        const std::vector<double> p =
            size_distribution(params.alpha, mu, sc.n);
        if (p[sc.k] <= 0.0) {
          diverged(split, epoch, static_cast<int>(e), static_cast<int>(t),
                   "oracle size has zero probability under the size rule");
        }
        double mix = 0.0;
        for (int i = 0; i < d_kernels; ++i) {
          mix += params.beta[i] * sc.comps[i];
        }
        if (mix <= 0.0) {
          diverged(split, epoch, static_cast<int>(e), static_cast<int>(t),
                   "oracle subset has zero probability under every kernel");
        }
        out.ll += std::log(p[sc.k]) + std::log(mix);
        if (want_grads) {
          if (unclamped) {
            double expected = 0.0;
            for (int j = 0; j <= sc.n; ++j) expected += j * p[j];
            out.grad_w +=
                2.0 * params.alpha * (sc.k - expected) * sc.phi;
          }
          for (int i = 0; i < d_kernels; ++i) {
            out.grad_beta[i] += sc.comps[i] / mix;
          }
        }
      } else {
        const int n = sc.n;
        Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < d_kernels; ++i) {
          omega += params.beta[i] * sc.kernels.omegas[i].entries();
        }
        const Eigen::MatrixXd sub = dense_submatrix(omega, sc.x);
        const double ld_sub = log_det_psd(sub);
        if (ld_sub == -kInf) {
          diverged(split, epoch, static_cast<int>(e), static_cast<int>(t),
                   "oracle subset has zero probability under the mixture");
        }
        const Eigen::MatrixXd full =
            omega + Eigen::MatrixXd::Identity(n, n);
        out.ll += ld_sub - log_det_psd(full);
        if (want_grads) {
          const Eigen::MatrixXd full_inv = full.inverse();
          Eigen::MatrixXd sub_inv;
          if (sc.k > 0) sub_inv = sub.inverse();
          for (int i = 0; i < d_kernels; ++i) {
            double g =
                -(full_inv * sc.kernels.omegas[i].entries()).trace();
            if (sc.k > 0) {
              g += (sub_inv *
                    dense_submatrix(sc.kernels.omegas[i].entries(), sc.x))
                       .trace();
            }
            out.grad_beta[i] += g;
          }
        }
      }
    }
  }
  if (!std::isfinite(out.ll)) {
    diverged(split, epoch, -1, -1, "non-finite batch log-likelihood");
  }
  return out;
}

struct FitOutcome {
  SeqGDPPParams params;
  double train_ll = -kInf;
  double val_ll = -kInf;
  std::vector<TrainRecord> records;
};

FitOutcome fit_one_alpha(ModelKind kind,
                         const std::vector<ExampleConstants> &train,
                         const std::vector<ExampleConstants> &val,
                         double alpha, int m0, int feature_dim,
                         const std::vector<int> &exponents,
                         const TrainHyperparams &hp) {
  const int d_kernels = static_cast<int>(exponents.size());
  std::vector<double> logits(d_kernels, 0.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(feature_dim);
  const auto make_params = [&]() {
    SeqGDPPParams p;
    p.beta = softmax(logits);
    p.w = w;
    p.alpha = alpha;
    p.m0 = m0;
    p.bandwidth_exponents = exponents;
    return p;
  };

  FitOutcome best;
  SeqGDPPParams params = make_params();
  double init_train_ll = 0.0;
  int since_improved = 0;
  for (int epoch = 0;; ++epoch) {
    const BatchEval tr = eval_batch(kind, train, params, true, "train", epoch);
    const double val_ll =
        val.empty() ? tr.ll
                    : eval_batch(kind, val, params, false, "val", epoch).ll;
    if (epoch == 0) init_train_ll = tr.ll;
    best.records.push_back({epoch, "train", -tr.ll, false, 0.0});
    best.records.push_back({epoch, "val", -val_ll, false, 0.0});

    const bool improved = val_ll > best.val_ll + kImproveTol;
    if (tr.ll >= init_train_ll - 1e-12 &&
        (improved || best.train_ll == -kInf)) {
      best.params = params;
      best.train_ll = tr.ll;
      best.val_ll = val_ll;
    }
    since_improved = improved ? 0 : since_improved + 1;
    if (epoch >= hp.max_epochs || since_improved >= hp.patience) break;

    // Step size is per example so the same rate works across corpus sizes.
    const double step = hp.learning_rate / static_cast<double>(train.size());
    double mean_grad = 0.0;
    for (int i = 0; i < d_kernels; ++i) {
      mean_grad += params.beta[i] * tr.grad_beta[i];
    }
    for (int i = 0; i < d_kernels; ++i) {
      logits[i] += step * params.beta[i] * (tr.grad_beta[i] - mean_grad);
    }
    if (kind == ModelKind::kSeqGDPP) w += step * tr.grad_w;
    params = make_params();
  }
  return best;
}

}  // namespace

int derive_m0(const std::vector<TrainingExample> &train) {
  if (train.empty()) {
    throw ArgumentError("cannot derive m0 from an empty training set");
  }
  double total = 0.0;
  for (const TrainingExample &ex : train) total += total_selected(*ex.oracle);
  const int m0 =
      static_cast<int>(std::llround(total / static_cast<double>(train.size())));
  return std::max(1, m0);
}

FittedModel train_mle(ModelKind kind,
                      const std::vector<TrainingExample> &train,
                      const std::vector<TrainingExample> &val,
                      const TrainHyperparams &hp) {
  if (train.empty()) {
    throw ArgumentError("training set is empty");
  }
  for (const TrainingExample &ex : train) {
    if (ex.seq == nullptr || ex.oracle == nullptr) {
      throw ArgumentError("training example missing sequence or oracle");
    }
  }
  for (const TrainingExample &ex : val) {
    if (ex.seq == nullptr || ex.oracle == nullptr) {
      throw ArgumentError("validation example missing sequence or oracle");
    }
  }
  if (hp.max_epochs < 0 || hp.patience < 1 || hp.num_kernels < 1 ||
      hp.learning_rate <= 0.0) {
    throw ArgumentError("invalid training hyperparameters");
  }

  const int m0 = hp.m0 > 0 ? hp.m0 : derive_m0(train);
  const std::vector<int> exponents =
      default_bandwidth_exponents(hp.num_kernels);
  const int feature_dim = train[0].seq->feature_dim();

  std::vector<ExampleConstants> cs_train, cs_val;
  for (const TrainingExample &ex : train) {
    cs_train.push_back(precompute_example(kind, ex, m0, exponents));
  }
  for (const TrainingExample &ex : val) {
    cs_val.push_back(precompute_example(kind, ex, m0, exponents));
  }

  std::vector<double> alphas;
  if (kind == ModelKind::kSeqGDPP) {
    alphas = hp.alpha_grid;
    if (alphas.empty()) {
      throw ArgumentError("alpha grid is empty");
    }
  } else {
    alphas = {1.0};
  }

  FitOutcome best;
  bool have = false;
  for (double alpha : alphas) {
    FitOutcome out = fit_one_alpha(kind, cs_train, cs_val, alpha, m0,
                                   feature_dim, exponents, hp);
    if (!have || out.val_ll > best.val_ll + kImproveTol) {
      best = std::move(out);
      have = true;
    }
  }

  FittedModel model;
  model.kind = kind;
  model.large_margin = false;
  model.params = std::move(best.params);
  model.train_ll = best.train_ll;
  model.val_ll = best.val_ll;
  model.records = std::move(best.records);
  return model;
}

}  // namespace seqgdpp
