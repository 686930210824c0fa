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

#ifndef SEQGDPP_DPP_HPP
#define SEQGDPP_DPP_HPP

#include <random>
#include <vector>

#include "seqgdpp/kernel.hpp"
#include "seqgdpp/subset.hpp"

namespace seqgdpp {

/// log P_L(Y = y) = log det(L_y) - log det(L + I).
/// A singular submatrix yields -inf (a zero-probability subset), not an
/// error.
double log_prob_ensemble(const PSDKernel &L, const SubsetIndex &y);

/// Marginal kernel K = L (L + I)^{-1}; det(K_y) is the probability that y is
/// contained in a draw. Provided for cross-checks; nothing downstream uses
/// it operationally.
PSDKernel marginal_kernel(const PSDKernel &L);

/// Elementary symmetric polynomials [e_0, ..., e_up_to] of `lambda` via the
/// O(N * up_to) recursion e_k^(n) = e_k^(n-1) + lambda_n e_{k-1}^(n-1).
std::vector<double> elementary_symmetric(const std::vector<double> &lambda,
                                         int up_to);

/// Conditional kernel of the DPP over `v_t` given that `x_prev` was already
/// selected:  Omega = ([(L + I_V)^{-1}]_V)^{-1} - I,  where I_V is the
/// identity with zeros on the diagonal entries of x_prev. `x_prev` and `v_t`
/// must disjointly cover the index set of `L_t`. The result is indexed by
/// v_t in ascending order.
PSDKernel condition_kernel(const PSDKernel &L_t, const SubsetIndex &x_prev,
                           const SubsetIndex &v_t);

/// Exact spectral DPP sample. Selects eigenvector n with probability
/// lambda_n / (1 + lambda_n), then projects-and-picks.
SubsetIndex sample_dpp(const PSDKernel &L, std::mt19937_64 &rng);

/// Exact k-DPP sample: eigenvector subsets of size k with probability
/// proportional to the product of their eigenvalues, then the same
/// projection phase. |result| == k always.
SubsetIndex sample_kdpp(const PSDKernel &L, int k, std::mt19937_64 &rng);

}  // namespace seqgdpp

#endif  // SEQGDPP_DPP_HPP
