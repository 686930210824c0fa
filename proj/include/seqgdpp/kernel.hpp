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

#ifndef SEQGDPP_KERNEL_HPP
#define SEQGDPP_KERNEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "seqgdpp/errors.hpp"
#include "seqgdpp/subset.hpp"

namespace seqgdpp {

/// Dense symmetric positive semi-definite kernel over a finite ground set.
///
/// Inputs are symmetrized as (A + A^T)/2 before validation, which absorbs
/// floating-point asymmetry from upstream kernel construction. Validation
/// rejects matrices whose smallest eigenvalue falls below
/// -1e-8 * max(largest eigenvalue, 0).
class PSDKernel {
 public:
  // Item ids default to 0..dim-1.
  explicit PSDKernel(Eigen::MatrixXd entries);
  PSDKernel(Eigen::MatrixXd entries, std::vector<std::int64_t> item_ids);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd &entries() const { return entries_; }
  const std::vector<std::int64_t> &item_ids() const { return item_ids_; }

  // Eigenvalues in descending order, clamped to [0, inf); computed during
  // validation.
  const std::vector<double> &eigenvalues() const { return eigenvalues_; }

  // Principal submatrix indexed by `y`.
  Eigen::MatrixXd submatrix(const SubsetIndex &y) const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<std::int64_t> item_ids_;
  std::vector<double> eigenvalues_;
};

/// L = sum_n lambda_n v_n v_n^T with descending eigenvalues and orthonormal
/// eigenvector columns. Eigenvalues in [-1e-8 * lambda_max, 0) are clamped
/// to 0; PSD projections drift slightly negative.
struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Eigen::MatrixXd eigenvectors;     // column n pairs with eigenvalues[n]
};

EigenDecomposition eigendecompose(const PSDKernel &kernel);

/// log det of a symmetric PSD matrix. Cholesky first, LU on semi-definite
/// failure; -inf for a singular matrix. The 0x0 matrix has det 1.
double log_det_psd(const Eigen::MatrixXd &m);

/// log det(L + I); L + I is positive definite for any valid kernel.
double log_det_plus_identity(const PSDKernel &kernel);

}  // namespace seqgdpp

#endif  // SEQGDPP_KERNEL_HPP
