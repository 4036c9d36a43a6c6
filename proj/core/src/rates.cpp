// SPDX-License-Identifier: Apache-2.0

#include "xlris/rates.hpp"

#include <cmath>
#include <string>

namespace xlris {

namespace {

void check_shapes(const std::vector<CMat>& channels, const CMat& w, const CVec& phi) {
  if (channels.empty()) throw InvalidInput("rates: no users");
  for (const auto& h : channels) {
    if (h.rows() != phi.size() || h.cols() != w.rows()) throw InvalidInput("rates: channel/precoder/phase size mismatch");
  }
  if (w.cols() != static_cast<Eigen::Index>(channels.size())) {
    throw InvalidInput("rates: precoder has " + std::to_string(w.cols()) + " columns for " +
                       std::to_string(channels.size()) + " users");
  }
}

double sinr_from_row(const Eigen::Ref<const CVec>& a_row, Eigen::Index k, double sigma2) {
  double interference = 0.0;
  for (Eigen::Index i = 0; i < a_row.size(); ++i) {
    if (i != k) interference += std::norm(a_row(i));
  }
  return std::norm(a_row(k)) / (interference + sigma2);
}

}  // namespace

CMat effective_channels(const std::vector<CMat>& channels, const CVec& phi) {
  if (channels.empty()) return {};
  CMat f(static_cast<Eigen::Index>(channels.size()), channels.front().cols());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].rows() != phi.size()) throw InvalidInput("effective_channels: phase length mismatch");
    f.row(static_cast<Eigen::Index>(k)) = phi.adjoint() * channels[k];
  }
  return f;
}

double user_sinr(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, int k, double sigma2) {
  check_shapes(channels, w, phi);
  if (k < 0 || k >= static_cast<int>(channels.size())) throw InvalidInput("user_sinr: user index out of range");
  if (!(sigma2 > 0.0)) throw InvalidInput("user_sinr: noise power must be positive");
  const CVec a = (phi.adjoint() * channels[static_cast<std::size_t>(k)] * w).transpose();
  return sinr_from_row(a, k, sigma2);
}

RVec achievable_rates(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, const RVec& sigma2) {
  check_shapes(channels, w, phi);
  if (sigma2.size() != static_cast<Eigen::Index>(channels.size())) {
    throw InvalidInput("achievable_rates: need one noise power per user");
  }
  const CMat a = effective_channels(channels, phi) * w;  // a(k, i) = phi^H H_k w_i
  RVec r(a.rows());
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    if (!(sigma2(k) > 0.0)) throw InvalidInput("achievable_rates: noise power must be positive");
    r(k) = std::log2(1.0 + sinr_from_row(a.row(k).transpose(), k, sigma2(k)));
  }
  return r;
}

RVec achievable_rates(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, double sigma2) {
  return achievable_rates(channels, w, phi, RVec::Constant(static_cast<Eigen::Index>(channels.size()), sigma2));
}

double jain_index(const RVec& rates) {
  if (rates.size() == 0) throw InvalidInput("jain_index: empty rate vector");
  if ((rates.array() < 0.0).any()) throw InvalidInput("jain_index: negative rate");
  const double sq = rates.squaredNorm();
  if (sq == 0.0) throw InvalidInput("jain_index: undefined for all-zero rates");
  const double s = rates.sum();
  return s * s / (static_cast<double>(rates.size()) * sq);
}

}  // namespace xlris
