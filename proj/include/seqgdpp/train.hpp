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

#ifndef SEQGDPP_TRAIN_HPP_
#define SEQGDPP_TRAIN_HPP_

#include <string>
#include <vector>

#include "seqgdpp/seq_model.hpp"

namespace seqgdpp {

// One training sequence with its teacher-forcing oracle. users is optional
// and only consulted for validation F1 scoring (large-margin training);
// when absent, the oracle stands in as the single reference. Pointed-to
// objects must outlive the trainer.
struct TrainingExample {
  const SegmentedSequence *seq = nullptr;
  const SelectionSequence *oracle = nullptr;
  const std::vector<SelectionSequence> *users = nullptr;
};

struct TrainHyperparams {
  int max_epochs = 150;
  double learning_rate = 0.05;
  int patience = 10;
  std::vector<double> alpha_grid{0.01, 0.1, 1.0, 10.0};
  int num_kernels = 10;
  // 0 derives m0 from the mean oracle length of the training set.
  int m0 = 0;
};

// One line of the training log; f1 is only present on validation records
// of the large-margin phase.
struct TrainRecord {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  bool has_f1 = false;
  double f1 = 0.0;
};

struct FittedModel {
  ModelKind kind = ModelKind::kSeqGDPP;
  bool large_margin = false;
  SeqGDPPParams params;
  double train_ll = 0.0;
  double val_ll = 0.0;
  // Validation F1 of the selected epoch; set by large-margin training only.
  double val_f1 = -1.0;
  std::vector<TrainRecord> records;
};

// Mean oracle length across the training set, rounded, at least 1.
int derive_m0(const std::vector<TrainingExample> &train);

// Full-batch gradient ascent on the teacher-forced log-likelihood. beta is
// learned through softmax logits so it stays on the simplex; w is free
// (SeqGDPP only); alpha comes from the validation grid. Early stopping
// watches the validation likelihood with the configured patience, and the
// returned parameters are the best validation candidate whose training
// likelihood is at least the initial value (so zero epochs return the
// initialization unchanged). Throws TrainingDivergedError when any loss
// evaluation is non-finite. With an empty validation set, the training set
// doubles as validation.
FittedModel train_mle(ModelKind kind,
                      const std::vector<TrainingExample> &train,
                      const std::vector<TrainingExample> &val,
                      const TrainHyperparams &hp);

}  // namespace seqgdpp

#endif  // SEQGDPP_TRAIN_HPP_
