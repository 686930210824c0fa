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

#include "seqgdpp/gdpp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "seqgdpp/errors.hpp"

namespace seqgdpp {

namespace {

constexpr double kWeightFloor = 1e-300;

void check_prior_matches(const SizePrior &prior, int dim) {
  if (prior.size() != dim + 1) {
    throw ArgumentError("size prior covers " + std::to_string(prior.size()) +
                        " sizes but the kernel needs " +
                        std::to_string(dim + 1));
  }
}

}  // namespace

SizePrior::SizePrior(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw ArgumentError("size prior must cover at least size 0");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ArgumentError("size prior weights must be finite and nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw ArgumentError("size prior must have at least one positive weight");
  }
}

SizePrior bounded_cardinality_prior(int n, int k1, int k2) {
  if (n < 0 || k1 < 0 || k1 > k2 || k2 > n) {
    throw ArgumentError("bounded cardinality prior needs 0 <= k1 <= k2 <= n");
  }
  std::vector<double> w(n + 1, 0.0);
  for (int k = k1; k <= k2; ++k) w[k] = 1.0;
  return SizePrior(std::move(w));
}

GDPPModel::GDPPModel(PSDKernel kernel, SizePrior prior)
    : kernel_(std::move(kernel)), prior_(std::move(prior)) {
  const int n = kernel_.dim();
  check_prior_matches(prior_, n);
  esym_ = elementary_symmetric(kernel_.eigenvalues(), n);
  z_ = 0.0;
  for (int k = 0; k <= n; ++k) z_ += prior_.weight(k) * esym_[k];
  if (!(z_ > 0.0) || !std::isfinite(z_)) {
    throw DegenerateModelError(
        "GDPP normalizer is not positive and finite; the size prior puts no "
        "weight on any size the kernel rank can reach");
  }
  p_.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) p_[k] = prior_.weight(k) * esym_[k] / z_;
}

double gdpp_normalizer(const PSDKernel &L, const SizePrior &prior) {
  const int n = L.dim();
  check_prior_matches(prior, n);
  const std::vector<double> e = elementary_symmetric(L.eigenvalues(), n);
  double z = 0.0;
  for (int k = 0; k <= n; ++k) z += prior.weight(k) * e[k];
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DegenerateModelError(
        "GDPP normalizer is not positive and finite; the size prior puts no "
        "weight on any size the kernel rank can reach");
  }
  return z;
}

double gdpp_log_prob(const GDPPModel &model, const SubsetIndex &y) {
  validate_subset(y, model.kernel().dim());
  const double pi = model.prior().weight(static_cast<int>(y.size()));
  if (pi <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(pi) + log_det_psd(model.kernel().submatrix(y)) -
         std::log(model.normalizer());
}

std::vector<double> mixture_weights(const GDPPModel &model) {
  return model.mixture_weights();
}

SubsetIndex sample_gdpp(const GDPPModel &model, std::mt19937_64 &rng) {
  const std::vector<double> &p = model.mixture_weights();
  double total = 0.0;
  for (double w : p) {
    if (w >= kWeightFloor) total += w;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = unif(rng) * total;
  int k = 0;
  for (int j = 0; j < static_cast<int>(p.size()); ++j) {
    if (p[j] < kWeightFloor) continue;
    k = j;
    r -= p[j];
    if (r <= 0.0) break;
  }
  return sample_kdpp(model.kernel(), k, rng);
}

}  // namespace seqgdpp
