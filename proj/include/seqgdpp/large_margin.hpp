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

#ifndef SEQGDPP_LARGE_MARGIN_HPP_
#define SEQGDPP_LARGE_MARGIN_HPP_

#include <Eigen/Dense>
#include <vector>

#include "seqgdpp/kernel.hpp"
#include "seqgdpp/sequence.hpp"
#include "seqgdpp/train.hpp"

namespace seqgdpp {

// Sequence-level cost delta: 1 - F1 on shot identities (cheap default) or
// 1 - concept-matching F1 from the evaluation metric.
enum class CostKind { kShotF1, kConceptF1 };

// Hinge margin [1 - log det(L_{x_oracle u x_prev}) +
// log det(L_{x_hat u x_prev})]_+ in the log-det domain. A singular oracle
// submatrix returns +inf (the oracle step is unreachable under L; callers
// should treat that as a warning, not silently train on it).
double margin_term(const PSDKernel &l_t, const SubsetIndex &x_oracle,
                   const SubsetIndex &x_hat, const SubsetIndex &x_prev);

// delta(candidate, oracle) = 1 - F1 in [0, 1]; 0 when both are empty.
double sequence_cost(const std::vector<Shot> &candidate,
                     const std::vector<Shot> &oracle, CostKind kind);

struct MarginStep {
  int t = 0;
  SubsetIndex oracle_x;
  SubsetIndex inferred_x;
  double margin = 0.0;
  double cost = 0.0;
};

struct LMLossResult {
  double loss = 0.0;
  Eigen::VectorXd grad_w;
  std::vector<double> grad_beta;
  std::vector<MarginStep> steps;
};

// Teacher-forced large-margin loss sum_t delta * M. Each step decodes
// x_hat_t by exact argmax of the model conditional given the oracle prefix;
// M compares the conditional log-probabilities of the oracle and decoded
// subsets (for SeqDPP the normalizers cancel and M reduces to margin_term
// on the mixed conditioned kernel). Subgradients in the free coordinates
// (w, beta) use the zero branch at the hinge kink and are zero wherever
// M = 0 or delta = 0.
LMLossResult lm_loss(ModelKind kind, const SeqGDPPParams &params,
                     const SegmentedSequence &seq,
                     const SelectionSequence &oracle, CostKind cost_kind);

struct LMHyperparams {
  TrainHyperparams mle;
  int margin_epochs = 15;
  double margin_learning_rate = 0.02;
  CostKind cost = CostKind::kShotF1;
};

// Mean unfiltered match F1 of full greedy inference against each example's
// user summaries (oracle when users are absent), averaged over examples.
double mean_validation_f1(ModelKind kind, const SeqGDPPParams &params,
                          const std::vector<TrainingExample> &examples);

// MLE pretraining followed by full-batch hinge subgradient descent.
// Returns the epoch with the best validation F1; epoch 0 is the MLE
// result, so zero margin epochs reproduce train_mle. Margin-phase records
// continue the MLE records' epoch numbering, with F1 on validation rows.
FittedModel lm_train(ModelKind kind,
                     const std::vector<TrainingExample> &train,
                     const std::vector<TrainingExample> &val,
                     const LMHyperparams &hp);

}  // namespace seqgdpp

#endif  // SEQGDPP_LARGE_MARGIN_HPP_
