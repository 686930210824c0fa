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

#ifndef SEQGDPP_GDPP_HPP_
#define SEQGDPP_GDPP_HPP_

#include <random>
#include <vector>

#include "seqgdpp/dpp.hpp"
#include "seqgdpp/kernel.hpp"
#include "seqgdpp/subset.hpp"

namespace seqgdpp {

// Unnormalized weights pi_k over subset sizes k = 0..N. Nonnegative, finite,
// not all zero; the GDPP normalizer divides out any scale.
class SizePrior {
 public:
  explicit SizePrior(std::vector<double> weights);

  // Number of sizes covered, N + 1.
  int size() const { return static_cast<int>(weights_.size()); }
  double weight(int k) const { return weights_[k]; }
  const std::vector<double> &weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// pi_k = 1 for k in [k1, k2], 0 otherwise. (n, 0, n) is the vanilla DPP,
// (n, k, k) the k-DPP.
SizePrior bounded_cardinality_prior(int n, int k1, int k2);

// A DPP reweighted by a size prior: P(y) = pi_{|y|} det(L_y) / Z_G with
// Z_G = sum_k pi_k e_k(lambda). Immutable after construction; caches the
// elementary symmetric polynomials, Z_G, and the mixture weights
// p_k = pi_k e_k / Z_G under which the model is a mixture of k-DPPs.
class GDPPModel {
 public:
  GDPPModel(PSDKernel kernel, SizePrior prior);

  const PSDKernel &kernel() const { return kernel_; }
  const SizePrior &prior() const { return prior_; }
  double normalizer() const { return z_; }
  const std::vector<double> &mixture_weights() const { return p_; }
  const std::vector<double> &esym() const { return esym_; }

 private:
  PSDKernel kernel_;
  SizePrior prior_;
  std::vector<double> esym_;
  std::vector<double> p_;
  double z_;
};

// Z_G = sum_k pi_k e_k(lambda). Throws DegenerateModelError when the prior
// puts no weight on any size the kernel's rank can reach.
double gdpp_normalizer(const PSDKernel &L, const SizePrior &prior);

// log(pi_{|y|} det(L_y) / Z_G); -inf when pi_{|y|} = 0 or L_y is singular.
double gdpp_log_prob(const GDPPModel &model, const SubsetIndex &y);

// p_k = pi_k e_k(lambda) / Z_G, summing to 1.
std::vector<double> mixture_weights(const GDPPModel &model);

// Two-phase exact sampler: draw k from the mixture weights, then a k-DPP
// draw. Weights below 1e-300 are treated as exact zeros.
SubsetIndex sample_gdpp(const GDPPModel &model, std::mt19937_64 &rng);

}  // namespace seqgdpp

#endif  // SEQGDPP_GDPP_HPP_
