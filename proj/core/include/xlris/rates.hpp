// SPDX-License-Identifier: Apache-2.0
//
// Per-user SINR and achievable rate for the RIS-assisted downlink
//   y_k = phi^H H_k sum_i w_i s_i + n_k,   H_k = diag(conj(h_k)) G  (N x M).

#pragma once

#include "xlris/linalg.hpp"

#include <vector>

namespace xlris {

/// Row k is phi^H H_k (K x M).
CMat effective_channels(const std::vector<CMat>& channels, const CVec& phi);

/// |phi^H H_k w_k|^2 / (sum_{i != k} |phi^H H_k w_i|^2 + sigma2)
double user_sinr(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, int k, double sigma2);

/// log2(1 + SINR_k) per user; sigma2 holds one noise power per user.
RVec achievable_rates(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, const RVec& sigma2);

/// Same noise power for every user.
RVec achievable_rates(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, double sigma2);

/// (sum R)^2 / (K sum R^2). Throws InvalidInput when every rate is zero.
double jain_index(const RVec& rates);

}  // namespace xlris
