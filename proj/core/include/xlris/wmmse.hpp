// SPDX-License-Identifier: Apache-2.0
//
// Sum-rate maximisation baseline by weighted MMSE: closed-form receivers v_k and
// weights rho_k, a ridge precoder step with one shared multiplier, and a discrete
// RIS step by IPDD.

#pragma once

#include "xlris/linalg.hpp"
#include "xlris/projections.hpp"
#include "xlris/solvers.hpp"

#include <vector>

namespace xlris {

/// Common starting point for the multiuser solvers.
struct MultiuserStart {
  CMat w;                   // M x K
  DiscretePhaseVector phi;
};

/// phi: CMDPP of sum_k H_k u_k with u_k the dominant right singular vector of H_k
/// (the closed-form phase choice for an identity gain target); W: equal-power
/// matched filters w_k = sqrt(P/K) (phi^H H_k)^H / ||phi^H H_k||.
MultiuserStart multiuser_start(const std::vector<CMat>& channels, double p_max, int bits);

struct WmmseConfig {
  int max_iters = 50;
  double rel_tol = 1e-9;       // stop when the sum rate grows by less than this (relative)
  bool optimise_phases = true; // false keeps phi at its initial value
  bool record_iterates = false;
  IpddConfig ipdd;
};

/// One accepted state of the alternation.
struct WmmseIterate {
  CVec v;      // receivers
  RVec rho;    // MSE weights
  CMat w;
  DiscretePhaseVector phi;
};

struct WmmseState {
  CVec v_aux;
  RVec rho_aux;
  CMat w_matrix;
  DiscretePhaseVector ris_phases;
  std::vector<double> sum_rate_trace;  // [0] = initial point
  std::vector<RVec> rate_trace;
  std::vector<WmmseIterate> iterates;  // filled when record_iterates
  int iterations = 0;
};

/// Closed-form receivers and weights at (W, phi):
///   v_k = a_kk / (sum_i |a_ki|^2 + sigma2),  rho_k = 1 / (1 - conj(v_k) a_kk),
/// with a_ki = phi^H H_k w_i.
void wmmse_receivers(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, double sigma2, CVec& v,
                     RVec& rho);

WmmseState wmmse_sum_rate(const std::vector<CMat>& channels, double p_max, double sigma2,
                          const MultiuserStart& init, const WmmseConfig& cfg = {});

}  // namespace xlris
