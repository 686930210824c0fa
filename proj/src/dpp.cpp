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

#include "seqgdpp/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqgdpp {

double log_prob_ensemble(const PSDKernel &L, const SubsetIndex &y) {
  validate_subset(y, L.dim());
  return log_det_psd(L.submatrix(y)) - log_det_plus_identity(L);
}

PSDKernel marginal_kernel(const PSDKernel &L) {
  const EigenDecomposition dec = eigendecompose(L);
  const int n = L.dim();
  Eigen::VectorXd scaled(n);
  for (int i = 0; i < n; ++i) {
    scaled(i) = dec.eigenvalues[i] / (1.0 + dec.eigenvalues[i]);
  }
  Eigen::MatrixXd k =
      dec.eigenvectors * scaled.asDiagonal() * dec.eigenvectors.transpose();
  return PSDKernel(std::move(k), L.item_ids());
}

std::vector<double> elementary_symmetric(const std::vector<double> &lambda,
                                         int up_to) {
  if (up_to < 0 || up_to > static_cast<int>(lambda.size())) {
    throw ArgumentError("elementary_symmetric: up_to = " +
                        std::to_string(up_to) + " out of range for " +
                        std::to_string(lambda.size()) + " eigenvalues");
  }
  std::vector<double> e(up_to + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (double l : lambda) {
    ++seen;
    for (int k = std::min(seen, up_to); k >= 1; --k) {
      e[k] += l * e[k - 1];
    }
  }
  return e;
}

PSDKernel condition_kernel(const PSDKernel &L_t, const SubsetIndex &x_prev,
                           const SubsetIndex &v_t) {
  const int n = L_t.dim();
  validate_subset(x_prev, n);
  validate_subset(v_t, n);
  if (static_cast<int>(x_prev.size() + v_t.size()) != n) {
    throw ArgumentError(
        "x_prev and v_t must disjointly cover the kernel index set");
  }
  {
    std::vector<bool> seen(n, false);
    for (int i : x_prev) seen[i] = true;
    for (int i : v_t) {
      if (seen[i]) {
        throw ArgumentError("x_prev and v_t overlap at index " +
                            std::to_string(i));
      }
    }
  }

  if (x_prev.empty()) {
    // I_V is the full identity and the algebra collapses to L itself.
    std::vector<std::int64_t> ids;
    for (int i : v_t) ids.push_back(L_t.item_ids()[i]);
    return PSDKernel(L_t.submatrix(v_t), std::move(ids));
  }

  Eigen::MatrixXd m = L_t.entries();
  for (int i : v_t) m(i, i) += 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw ConditioningError(
        "conditioning failed: L + I_V is singular (the conditioned-on "
        "selection has probability zero)");
  }
  const Eigen::MatrixXd m_inv = lu.inverse();

  const int nv = static_cast<int>(v_t.size());
  Eigen::MatrixXd block(nv, nv);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) block(i, j) = m_inv(v_t[i], v_t[j]);

  Eigen::FullPivLU<Eigen::MatrixXd> block_lu(block);
  if (!block_lu.isInvertible()) {
    throw ConditioningError(
        "conditioning failed: [(L + I_V)^{-1}]_V is singular");
  }
  Eigen::MatrixXd omega = block_lu.inverse();
  omega.diagonal().array() -= 1.0;

  std::vector<std::int64_t> ids;
  for (int i : v_t) ids.push_back(L_t.item_ids()[i]);
  return PSDKernel(std::move(omega), std::move(ids));
}

namespace {

// Projection phase shared by DPP and k-DPP sampling: given orthonormal
// columns spanning the selected elementary DPP, pick items one at a time and
// project the span away from each picked coordinate.
SubsetIndex sample_projection(const Eigen::MatrixXd &vectors,
                              const std::vector<int> &chosen_cols,
                              std::mt19937_64 &rng) {
  const int n = static_cast<int>(vectors.rows());
  int k = static_cast<int>(chosen_cols.size());
  Eigen::MatrixXd v(n, k);
  for (int j = 0; j < k; ++j) v.col(j) = vectors.col(chosen_cols[j]);

  SubsetIndex result;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (k > 0) {
    Eigen::VectorXd weights = v.leftCols(k).rowwise().squaredNorm();
    const double total = weights.sum();
    double r = unif(rng) * total;
    int item = -1;
    for (int a = 0; a < n; ++a) {
      if (weights(a) <= 0.0) continue;
      item = a;
      r -= weights(a);
      if (r <= 0.0) break;
    }
    result.push_back(item);

    if (k == 1) break;

    // Pivot on the column with the largest component at `item`.
    int pivot = 0;
    for (int j = 1; j < k; ++j) {
      if (std::abs(v(item, j)) > std::abs(v(item, pivot))) pivot = j;
    }
    Eigen::VectorXd pivot_col = v.col(pivot);
    v.col(pivot) = v.col(k - 1);
    const double scale = pivot_col(item);
    for (int j = 0; j < k - 1; ++j) {
      v.col(j) -= pivot_col * (v(item, j) / scale);
    }
    // Re-orthonormalize the remaining span.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v.leftCols(k - 1));
    v.leftCols(k - 1) =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, k - 1);
    --k;
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

SubsetIndex sample_dpp(const PSDKernel &L, std::mt19937_64 &rng) {
  const EigenDecomposition dec = eigendecompose(L);
  std::vector<int> chosen;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < L.dim(); ++i) {
    const double lambda = dec.eigenvalues[i];
    if (unif(rng) <= lambda / (1.0 + lambda)) chosen.push_back(i);
  }
  if (chosen.empty()) return {};
  return sample_projection(dec.eigenvectors, chosen, rng);
}

SubsetIndex sample_kdpp(const PSDKernel &L, int k, std::mt19937_64 &rng) {
  const int n = L.dim();
  if (k < 0 || k > n) {
    throw CardinalityError("k-DPP size " + std::to_string(k) +
                           " out of range for ground set of size " +
                           std::to_string(n));
  }
  if (k == 0) return {};

  const EigenDecomposition dec = eigendecompose(L);
  const std::vector<double> &lambda = dec.eigenvalues;

  // E(l, m) = e_l over the first m eigenvalues.
  std::vector<std::vector<double>> e(k + 1, std::vector<double>(n + 1, 0.0));
  for (int m = 0; m <= n; ++m) e[0][m] = 1.0;
  for (int l = 1; l <= k; ++l) {
    for (int m = 1; m <= n; ++m) {
      e[l][m] = e[l][m - 1] + lambda[m - 1] * e[l - 1][m - 1];
    }
  }
  if (e[k][n] <= 0.0) {
    throw UnsatisfiableSizeError(
        "no size-" + std::to_string(k) +
        " subset has positive probability (e_k = 0; kernel rank too low)");
  }

  std::vector<int> chosen;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int remaining = k;
  for (int m = n; m >= 1 && remaining > 0; --m) {
    double p_include;
    if (m == remaining) {
      p_include = 1.0;
    } else if (e[remaining][m] <= 0.0) {
      continue;
    } else {
      p_include = lambda[m - 1] * e[remaining - 1][m - 1] / e[remaining][m];
    }
    if (unif(rng) < p_include) {
      chosen.push_back(m - 1);
      --remaining;
    }
  }
  return sample_projection(dec.eigenvectors, chosen, rng);
}

}  // namespace seqgdpp
