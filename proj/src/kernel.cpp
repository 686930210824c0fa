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

#include "seqgdpp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace seqgdpp {

namespace {

constexpr double kPsdRelTol = 1e-8;

std::vector<std::int64_t> default_ids(int dim) {
  std::vector<std::int64_t> ids(dim);
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return ids;
}

}  // namespace

PSDKernel::PSDKernel(Eigen::MatrixXd entries)
    : PSDKernel(std::move(entries), {}) {}

PSDKernel::PSDKernel(Eigen::MatrixXd entries,
                     std::vector<std::int64_t> item_ids)
    : entries_(std::move(entries)), item_ids_(std::move(item_ids)) {
  if (entries_.rows() != entries_.cols()) {
    throw InvalidKernelError("kernel matrix must be square, got " +
                             std::to_string(entries_.rows()) + "x" +
                             std::to_string(entries_.cols()));
  }
  if (item_ids_.empty()) {
    item_ids_ = default_ids(dim());
  } else if (static_cast<int>(item_ids_.size()) != dim()) {
    throw InvalidKernelError("item_ids length " +
                             std::to_string(item_ids_.size()) +
                             " does not match kernel dim " +
                             std::to_string(dim()));
  }
  if (!entries_.allFinite()) {
    throw InvalidKernelError("kernel matrix has non-finite entries");
  }

  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();

  if (dim() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      entries_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InvalidKernelError("eigenvalue computation failed");
  }
  const Eigen::VectorXd &vals = solver.eigenvalues();  // ascending
  const double lambda_max = vals(dim() - 1);
  const double lambda_min = vals(0);
  // Tiny absolute slack keeps near-zero matrices from tripping on roundoff.
  const double tol = kPsdRelTol * std::max(lambda_max, 0.0) + 1e-14;
  if (lambda_min < -tol) {
    throw InvalidKernelError(
        "kernel is not positive semi-definite: lambda_min = " +
        std::to_string(lambda_min) + ", lambda_max = " +
        std::to_string(lambda_max));
  }
  eigenvalues_.resize(dim());
  for (int i = 0; i < dim(); ++i) {
    eigenvalues_[i] = std::max(vals(dim() - 1 - i), 0.0);
  }
}

Eigen::MatrixXd PSDKernel::submatrix(const SubsetIndex &y) const {
  validate_subset(y, dim());
  const int n = static_cast<int>(y.size());
  Eigen::MatrixXd sub(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sub(i, j) = entries_(y[i], y[j]);
  return sub;
}

EigenDecomposition eigendecompose(const PSDKernel &kernel) {
  const int n = kernel.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel.entries());
  if (solver.info() != Eigen::Success) {
    throw InvalidKernelError("eigendecomposition failed");
  }
  EigenDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.eigenvectors.resize(n, n);
  const Eigen::VectorXd &vals = solver.eigenvalues();
  const double lambda_max = n > 0 ? std::max(vals(n - 1), 0.0) : 0.0;
  for (int i = 0; i < n; ++i) {
    double v = vals(n - 1 - i);
    if (v < 0.0) {
      if (v < -kPsdRelTol * lambda_max - 1e-14) {
        throw InvalidKernelError("negative eigenvalue beyond clamp range: " +
                                 std::to_string(v));
      }
      v = 0.0;
    }
    dec.eigenvalues[i] = v;
    dec.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return dec;
}

double log_det_psd(const Eigen::MatrixXd &m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 0.0;

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = llt.matrixL()(i, i);
      if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
      log_det += 2.0 * std::log(d);
    }
    return log_det;
  }

  // Semi-definite: Cholesky failed. LU recovers the determinant sign; any
  // non-positive determinant is a zero-probability subset.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd &u = lu.matrixLU();
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant() > 0 ? 1.0 : -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = u(i, i);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  if (sign <= 0.0) return -std::numeric_limits<double>::infinity();
  return log_abs;
}

double log_det_plus_identity(const PSDKernel &kernel) {
  double log_det = 0.0;
  for (double lambda : kernel.eigenvalues()) log_det += std::log1p(lambda);
  return log_det;
}

}  // namespace seqgdpp
