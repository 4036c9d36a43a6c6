// SPDX-License-Identifier: Apache-2.0
//
// Factorisation of a full-digital precoder w* (length M) into a discrete-phase
// analog matrix V_A (M x M_RF) and a digital vector v_D (M_RF) with
// ||V_A v_D||^2 <= P.

#pragma once

#include "xlris/linalg.hpp"
#include "xlris/projections.hpp"
#include "xlris/solvers.hpp"

#include <vector>

namespace xlris {

struct HybridPrecoder {
  Eigen::Index antennas = 0;
  Eigen::Index rf_chains = 0;
  DiscretePhaseVector analog;  // vec(V_A), column-major
  CVec digital;                // v_D
  double residual = 0.0;       // ||V_A v_D - w*||^2
  std::vector<double> residual_trace;  // [0] after the initial digital fit, then one per round
  bool regularized = false;    // some digital solve met a rank-deficient V_A

  [[nodiscard]] CMat analog_matrix() const;
  [[nodiscard]] CVec precoder() const { return analog_matrix() * digital; }
};

struct DigitalSolution {
  CVec v;
  double lambda = 0.0;
  bool regularized = false;
};

/// v_D = (V^H V)^{-1} V^H w* / (1 + lambda), lambda = max(0, ||P_V w*|| / sqrt(P) - 1).
/// A rank-deficient V_A falls back to the minimum-norm least-squares solution.
DigitalSolution solve_digital(const CMat& analog, const CVec& w_star, double p_max);

/// Discrete V_A minimising ||V_A v_D - w*||^2 by IPDD on vec(V_A), started from `init`.
DiscretePhaseVector solve_analog(const CVec& digital, const CVec& w_star, const IpddConfig& ipdd,
                                 const DiscretePhaseVector& init);

/// Column j: CMDPP of w* modulated by the j-th DFT vector exp(j 2 pi j m / M).
DiscretePhaseVector initial_analog(const CVec& w_star, Eigen::Index rf_chains, int bits);

HybridPrecoder hybrid_factorize(const CVec& w_star, Eigen::Index rf_chains, const IpddConfig& ipdd, double p_max,
                                int rounds);

}  // namespace xlris
