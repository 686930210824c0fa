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

#ifndef SEQGDPP_CHECKPOINT_HPP_
#define SEQGDPP_CHECKPOINT_HPP_

#include <string>

#include "seqgdpp/seq_model.hpp"

namespace seqgdpp {

// A trained model as persisted on disk. feature_dim is stored explicitly so
// a checkpoint can be validated against a dataset before any inference runs.
struct Checkpoint {
  ModelKind kind = ModelKind::kSeqGDPP;
  bool large_margin = false;
  SeqGDPPParams params;
};

// "seqdpp", "lm-seqdpp", "seqgdpp" or "lm-seqgdpp".
std::string checkpoint_kind_string(ModelKind kind, bool large_margin);

// Inverse of checkpoint_kind_string. Throws ParseError on unknown strings.
Checkpoint checkpoint_kind_from_string(const std::string &name);

// Canonical JSON serialization with a fixed key order:
// {"kind", "beta", "w", "alpha", "M0", "bandwidth_exponents", "feature_dim"}.
// save(load(path)) reproduces the file byte for byte.
std::string checkpoint_to_json(const Checkpoint &ckpt);
Checkpoint checkpoint_from_json(const std::string &text,
                                const std::string &context);

void save_checkpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

}  // namespace seqgdpp

#endif  // SEQGDPP_CHECKPOINT_HPP_
