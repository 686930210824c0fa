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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace seqgdpp::oracle {

double det(const Eigen::MatrixXd &m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
  }
  double result = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (a[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      result = -result;
    }
    result *= a[col][col];
    for (int row = col + 1; row < n; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (int j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
    }
  }
  return result;
}

double det_sub(const Eigen::MatrixXd &m, const SubsetIndex &y) {
  const int k = static_cast<int>(y.size());
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) sub(i, j) = m(y[i], y[j]);
  }
  return det(sub);
}

std::vector<SubsetIndex> all_subsets(int n) {
  std::vector<SubsetIndex> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    SubsetIndex y;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) y.push_back(i);
    }
    out.push_back(std::move(y));
  }
  return out;
}

Eigen::MatrixXd random_psd(int n, std::mt19937_64 &rng, double ridge) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n + 2, n);
  for (int i = 0; i < n + 2; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  Eigen::MatrixXd l = (a.transpose() * a) / static_cast<double>(n);
  if (ridge > 0.0) l += ridge * Eigen::MatrixXd::Identity(n, n);
  return l;
}

std::vector<double> ensemble_probs(const Eigen::MatrixXd &l) {
  const int n = static_cast<int>(l.rows());
  std::vector<double> dets;
  double z = 0.0;
  for (const SubsetIndex &y : all_subsets(n)) {
    const double d = det_sub(l, y);
    dets.push_back(d);
    z += d;
  }
  for (double &d : dets) d /= z;
  return dets;
}

std::vector<double> conditional_probs(const Eigen::MatrixXd &l,
                                      const SubsetIndex &x_prev,
                                      const SubsetIndex &v) {
  std::vector<double> dets;
  double z = 0.0;
  for (const SubsetIndex &pos : all_subsets(static_cast<int>(v.size()))) {
    SubsetIndex merged = x_prev;
    for (int p : pos) merged.push_back(v[p]);
    std::sort(merged.begin(), merged.end());
    const double d = det_sub(l, merged);
    dets.push_back(d);
    z += d;
  }
  for (double &d : dets) d /= z;
  return dets;
}

std::vector<double> esym_enumerated(const std::vector<double> &lambda,
                                    int up_to) {
  const int n = static_cast<int>(lambda.size());
  std::vector<double> e(up_to + 1, 0.0);
  for (const SubsetIndex &y : all_subsets(n)) {
    if (static_cast<int>(y.size()) > up_to) continue;
    double product = 1.0;
    for (int i : y) product *= lambda[i];
    e[y.size()] += product;
  }
  return e;
}

namespace {

double matching_rec(const Eigen::MatrixXd &w, int row,
                    std::uint32_t used_cols, std::vector<double> &memo,
                    std::vector<bool> &seen) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  if (row == rows) return 0.0;
  const std::size_t key =
      static_cast<std::size_t>(row) * (std::size_t{1} << cols) + used_cols;
  if (seen[key]) return memo[key];
  double best = matching_rec(w, row + 1, used_cols, memo, seen);
  for (int c = 0; c < cols; ++c) {
    if (used_cols & (std::uint32_t{1} << c)) continue;
    best = std::max(best, w(row, c) + matching_rec(w, row + 1,
                                                   used_cols |
                                                       (std::uint32_t{1} << c),
                                                   memo, seen));
  }
  seen[key] = true;
  memo[key] = best;
  return best;
}

}  // namespace

double matching_weight(const Eigen::MatrixXd &weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  if (rows == 0 || cols == 0) return 0.0;
  const std::size_t states =
      static_cast<std::size_t>(rows) * (std::size_t{1} << cols);
  std::vector<double> memo(states, 0.0);
  std::vector<bool> seen(states, false);
  return matching_rec(weights, 0, 0, memo, seen);
}

double central_diff(const std::function<double(double)> &f, double x,
                    double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double tv_distance(const std::vector<double> &p,
                   const std::vector<double> &q) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace seqgdpp::oracle
