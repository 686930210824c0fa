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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "oracles.hpp"
#include "seqgdpp/dpp.hpp"
#include "seqgdpp/kernel.hpp"
#include "seqgdpp/subset.hpp"

namespace {

using namespace seqgdpp;

Eigen::MatrixXd two_one_kernel() {
  Eigen::MatrixXd l(2, 2);
  l << 2.0, 1.0, 1.0, 2.0;
  return l;
}

}  // namespace

TEST_CASE("validate_subset accepts sorted unique indices in range") {
  CHECK_NOTHROW(validate_subset({}, 3));
  CHECK_NOTHROW(validate_subset({0, 2}, 3));
  CHECK_THROWS_AS(validate_subset({2, 0}, 3), ArgumentError);
  CHECK_THROWS_AS(validate_subset({0, 0}, 3), ArgumentError);
  CHECK_THROWS_AS(validate_subset({3}, 3), ArgumentError);
  CHECK_THROWS_AS(validate_subset({-1}, 3), ArgumentError);
}

TEST_CASE("subset_from_mask decodes bit positions in ascending order") {
  CHECK(subset_from_mask(0, 4) == SubsetIndex{});
  CHECK(subset_from_mask(0b101, 4) == SubsetIndex{0, 2});
  CHECK(subset_from_mask(0b1111, 4) == SubsetIndex{0, 1, 2, 3});
}

TEST_CASE("subset_lex_less orders by index sequence") {
  CHECK(subset_lex_less({}, {0}));
  CHECK(subset_lex_less({0}, {0, 1}));
  CHECK(subset_lex_less({0, 1}, {0, 2}));
  CHECK(subset_lex_less({0, 2}, {1}));
  CHECK_FALSE(subset_lex_less({1}, {0, 2}));
  CHECK_FALSE(subset_lex_less({0}, {0}));
}

TEST_CASE("PSDKernel symmetrizes its input") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.3, 0.1, 1.0;
  PSDKernel k(a);
  CHECK(k.entries()(0, 1) == doctest::Approx(0.2));
  CHECK(k.entries()(1, 0) == doctest::Approx(0.2));
}

TEST_CASE("PSDKernel rejects indefinite matrices") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(PSDKernel{a}, InvalidKernelError);
}

TEST_CASE("PSDKernel clamps slightly negative eigenvalues to zero") {
  Eigen::MatrixXd a(2, 2);
  const double eps = 1e-12;
  a << 1.0, 1.0 + eps, 1.0 + eps, 1.0;  // smallest eigenvalue -eps
  PSDKernel k(a);
  for (double lambda : k.eigenvalues()) CHECK(lambda >= 0.0);
}

TEST_CASE("PSDKernel item ids default to 0..dim-1 and are preserved") {
  PSDKernel def(Eigen::MatrixXd::Identity(3, 3));
  CHECK(def.item_ids() == std::vector<std::int64_t>{0, 1, 2});
  PSDKernel named(Eigen::MatrixXd::Identity(2, 2), {7, 9});
  CHECK(named.item_ids() == std::vector<std::int64_t>{7, 9});
  CHECK_THROWS_AS(PSDKernel(Eigen::MatrixXd::Identity(2, 2),
                            std::vector<std::int64_t>{1}),
                  InvalidKernelError);
}

TEST_CASE("submatrix extracts the principal block") {
  PSDKernel k(two_one_kernel());
  Eigen::MatrixXd sub = k.submatrix({1});
  CHECK(sub.rows() == 1);
  CHECK(sub(0, 0) == doctest::Approx(2.0));
  CHECK(k.submatrix({}).rows() == 0);
}

TEST_CASE("log_det_psd handles empty, singular, and PD matrices") {
  CHECK(log_det_psd(Eigen::MatrixXd(0, 0)) == doctest::Approx(0.0));
  CHECK(std::isinf(log_det_psd(Eigen::MatrixXd::Zero(2, 2))));
  CHECK(log_det_psd(Eigen::MatrixXd::Zero(2, 2)) < 0.0);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);  // rank 1
  CHECK(std::isinf(log_det_psd(ones)));
  CHECK(log_det_psd(two_one_kernel()) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("log_det_plus_identity matches the oracle determinant") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    PSDKernel k(oracle::random_psd(n, rng));
    const double expected = std::log(oracle::det(
        k.entries() + Eigen::MatrixXd::Identity(n, n)));
    CHECK(std::abs(log_det_plus_identity(k) - expected) < 1e-8);
  }
}

TEST_CASE("log_prob_ensemble frozen values") {
  PSDKernel identity(Eigen::MatrixXd::Identity(2, 2));
  CHECK(log_prob_ensemble(identity, {0}) ==
        doctest::Approx(std::log(0.25)));

  PSDKernel k(two_one_kernel());
  CHECK(log_prob_ensemble(k, {0, 1}) == doctest::Approx(std::log(3.0 / 8.0)));
  CHECK(log_prob_ensemble(k, {}) == doctest::Approx(std::log(1.0 / 8.0)));
}

TEST_CASE("log_prob_ensemble returns -inf for singular submatrices") {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  PSDKernel k(ones);
  CHECK(std::isinf(log_prob_ensemble(k, {0, 1})));
}

TEST_CASE("ensemble probabilities sum to one and match enumeration") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 9);
    PSDKernel k(oracle::random_psd(n, rng));
    const std::vector<double> expected = oracle::ensemble_probs(k.entries());
    const std::vector<SubsetIndex> subsets = oracle::all_subsets(n);
    double total = 0.0;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const double p = std::exp(log_prob_ensemble(k, subsets[i]));
      CHECK(std::abs(p - expected[i]) < 1e-8);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-8);
  }
}

TEST_CASE("marginal_kernel frozen values") {
  PSDKernel identity(Eigen::MatrixXd::Identity(2, 2));
  PSDKernel k_id = marginal_kernel(identity);
  CHECK(k_id.entries().isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2), 1e-12));

  PSDKernel k = marginal_kernel(PSDKernel(two_one_kernel()));
  // Inclusion marginal of item 0: P({0}) + P({0,1}) = 2/8 + 3/8.
  CHECK(k.entries()(0, 0) == doctest::Approx(5.0 / 8.0));

  PSDKernel zero = marginal_kernel(PSDKernel(Eigen::MatrixXd::Zero(2, 2)));
  CHECK(zero.entries().isZero(1e-12));
}

TEST_CASE("marginal_kernel eigenvalues lie in [0, 1]") {
  std::mt19937_64 rng(3);
  PSDKernel k = marginal_kernel(PSDKernel(oracle::random_psd(6, rng)));
  for (double lambda : k.eigenvalues()) {
    CHECK(lambda >= 0.0);
    CHECK(lambda <= 1.0 + 1e-12);
  }
}

TEST_CASE("marginal kernel reproduces inclusion marginals by enumeration") {
  std::mt19937_64 rng(5);
  const int n = 5;
  PSDKernel l(oracle::random_psd(n, rng));
  PSDKernel k = marginal_kernel(l);
  const std::vector<double> probs = oracle::ensemble_probs(l.entries());
  const std::vector<SubsetIndex> subsets = oracle::all_subsets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double both = 0.0;
      for (std::size_t s = 0; s < subsets.size(); ++s) {
        bool has_i = false, has_j = false;
        for (int idx : subsets[s]) {
          has_i |= idx == i;
          has_j |= idx == j;
        }
        if (has_i && has_j) both += probs[s];
      }
      // det of the 2x2 marginal block: K_ii K_jj - K_ij^2.
      const double from_k = k.entries()(i, i) * k.entries()(j, j) -
                            k.entries()(i, j) * k.entries()(i, j);
      CHECK(std::abs(both - from_k) < 1e-8);
    }
  }
}

TEST_CASE("elementary_symmetric frozen values") {
  CHECK(elementary_symmetric({1.0, 2.0, 3.0}, 3) ==
        std::vector<double>{1.0, 6.0, 11.0, 6.0});
  CHECK(elementary_symmetric({5.0}, 1) == std::vector<double>{1.0, 5.0});
  CHECK(elementary_symmetric({0.0, 0.0}, 2) ==
        std::vector<double>{1.0, 0.0, 0.0});
  CHECK(elementary_symmetric({}, 0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(elementary_symmetric({1.0}, 2), ArgumentError);
}

TEST_CASE("elementary_symmetric matches enumeration and det identities") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 9);
    PSDKernel k(oracle::random_psd(n, rng));
    const std::vector<double> lambda = k.eigenvalues();
    const std::vector<double> e = elementary_symmetric(lambda, n);
    const std::vector<double> expected = oracle::esym_enumerated(lambda, n);
    double sum = 0.0;
    double product = 1.0;
    for (int i = 0; i <= n; ++i) {
      CHECK(oracle::rel_err(e[i], expected[i]) < 1e-10);
      sum += e[i];
    }
    for (double l : lambda) product *= l;
    // Characteristic-polynomial identities: sum_k e_k = det(L + I) and
    // e_N = prod lambda.
    CHECK(oracle::rel_err(
              sum, oracle::det(k.entries() +
                               Eigen::MatrixXd::Identity(n, n))) < 1e-8);
    CHECK(std::abs(e[n] - product) <
          1e-10 * std::max(1.0, std::abs(product)));
  }
}

TEST_CASE("condition_kernel with empty x_prev returns L itself") {
  std::mt19937_64 rng(23);
  PSDKernel l(oracle::random_psd(4, rng));
  PSDKernel omega = condition_kernel(l, {}, {0, 1, 2, 3});
  CHECK(omega.entries().isApprox(l.entries(), 1e-10));
}

TEST_CASE("condition_kernel on independent items is the identity") {
  PSDKernel l(Eigen::MatrixXd::Identity(3, 3));
  PSDKernel omega = condition_kernel(l, {0}, {1, 2});
  CHECK(omega.dim() == 2);
  CHECK(omega.entries().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-10));
}

TEST_CASE("condition_kernel matches the brute-force conditional") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 5;
    PSDKernel l(oracle::random_psd(n, rng, 1e-6));
    const SubsetIndex x_prev{0, 1};
    const SubsetIndex v{2, 3, 4};
    PSDKernel omega = condition_kernel(l, x_prev, v);
    const std::vector<double> expected =
        oracle::conditional_probs(l.entries(), x_prev, v);
    const std::vector<SubsetIndex> subsets =
        oracle::all_subsets(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const double p = std::exp(log_prob_ensemble(omega, subsets[i]));
      CHECK(std::abs(p - expected[i]) < 1e-8);
    }
  }
}

TEST_CASE("condition_kernel equals the Schur complement") {
  // Independent identity: Omega = L_V - L_{V,P} L_P^{-1} L_{P,V}.
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    PSDKernel l(oracle::random_psd(6, rng, 1e-6));
    const SubsetIndex x_prev{1, 4};
    const SubsetIndex v{0, 2, 3, 5};
    PSDKernel omega = condition_kernel(l, x_prev, v);
    Eigen::MatrixXd lv = l.submatrix(v);
    Eigen::MatrixXd lp = l.submatrix(x_prev);
    Eigen::MatrixXd cross(v.size(), x_prev.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < x_prev.size(); ++j) {
        cross(i, j) = l.entries()(v[i], x_prev[j]);
      }
    }
    Eigen::MatrixXd schur = lv - cross * lp.inverse() * cross.transpose();
    CHECK(omega.entries().isApprox(schur, 1e-8));
  }
}

TEST_CASE("condition_kernel rejects zero-probability conditioning") {
  // Duplicate rows make L_{x_prev} singular, so L + I_V is singular too.
  Eigen::MatrixXd l(3, 3);
  l << 1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 0.5, 0.5, 1.0;
  PSDKernel kernel(l);
  CHECK_THROWS_AS(condition_kernel(kernel, {0, 1}, {2}), ConditioningError);
}

TEST_CASE("condition_kernel validates the index cover") {
  PSDKernel l(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(condition_kernel(l, {0}, {1}), ArgumentError);     // gap
  CHECK_THROWS_AS(condition_kernel(l, {0}, {0, 1, 2}), ArgumentError);
}

TEST_CASE("sample_kdpp subset size is always k") {
  std::mt19937_64 rng(37);
  PSDKernel l(oracle::random_psd(6, rng));
  for (int k = 0; k <= 6; ++k) {
    for (int rep = 0; rep < 20; ++rep) {
      CHECK(static_cast<int>(sample_kdpp(l, k, rng).size()) == k);
    }
  }
}

TEST_CASE("sample_kdpp frozen degenerate cases") {
  std::mt19937_64 rng(41);
  PSDKernel identity(Eigen::MatrixXd::Identity(2, 2));
  for (int rep = 0; rep < 5; ++rep) {
    CHECK(sample_kdpp(identity, 2, rng) == SubsetIndex{0, 1});
  }
  CHECK_THROWS_AS(sample_kdpp(identity, 3, rng), CardinalityError);
  // Rank-1 kernel cannot produce two items.
  PSDKernel rank1(Eigen::MatrixXd::Ones(2, 2));
  CHECK_THROWS_AS(sample_kdpp(rank1, 2, rng), UnsatisfiableSizeError);
}

TEST_CASE("sample_dpp on the zero kernel is always empty") {
  std::mt19937_64 rng(43);
  PSDKernel zero(Eigen::MatrixXd::Zero(3, 3));
  for (int rep = 0; rep < 10; ++rep) {
    CHECK(sample_dpp(zero, rng).empty());
  }
}

TEST_CASE("sample_kdpp empirical singleton frequencies match det ratios") {
  std::mt19937_64 rng(47);
  PSDKernel k(two_one_kernel());
  int zero_count = 0;
  const int draws = 20000;
  for (int rep = 0; rep < draws; ++rep) {
    if (sample_kdpp(k, 1, rng) == SubsetIndex{0}) ++zero_count;
  }
  CHECK(std::abs(zero_count / static_cast<double>(draws) - 0.5) < 0.02);
}

TEST_CASE("sample_dpp is deterministic given the rng state") {
  PSDKernel l(two_one_kernel());
  std::mt19937_64 a(51), b(51);
  for (int rep = 0; rep < 10; ++rep) {
    CHECK(sample_dpp(l, a) == sample_dpp(l, b));
  }
}
