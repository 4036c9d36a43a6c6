// SPDX-License-Identifier: Apache-2.0
//
// Interference management by desired-gain-matrix approximation. The design
// target for phi^H H_i w_k is Q(i, k) Q_nu(i, k): large on the diagonal (desired
// links), small off it. Precoders and RIS phases are fitted to the target by
// alternating optimisation, and the parameters chi = (alpha, beta, gamma1,
// gamma2, gamma3) that shape Q are adapted by forward-difference gradient ascent
// on Jain's fairness index.
//
// Index layout: q_tilde = vec(Q .* Q_nu) column-major, so entry k * K + i is the
// target of phi^H H_i w_k, and column k * K + i of Xi is H_i w_k.

#pragma once

#include "xlris/linalg.hpp"
#include "xlris/projections.hpp"
#include "xlris/rates.hpp"
#include "xlris/solvers.hpp"
#include "xlris/wmmse.hpp"

#include <array>
#include <vector>

namespace xlris {

struct FairnessParams {
  double alpha = 1.0;
  double beta = 0.01;
  double gamma1 = 0.5;
  double gamma2 = 1.0;
  double gamma3 = 1.0;
  double eps_h = 1e-12;
  double step = 0.1;      // eta_chi
  double perturb = 1e-2;  // delta_chi: relative for alpha, beta; absolute for the exponents

  /// chi = (sqrt(P)/K, 0.01, 0.5, 1, 1).
  static FairnessParams initial(double p_max, int users);

  [[nodiscard]] std::array<double, 5> chi() const { return {alpha, beta, gamma1, gamma2, gamma3}; }
  void set_chi(const std::array<double, 5>& c);
  void validate() const;
};

struct GainMatrix {
  RMat q_amp;    // K x K, row = receiving user i, column = stream k
  CMat q_phase;  // unit modulus

  /// vec(Q .* Q_nu)
  [[nodiscard]] CVec target() const;
};

/// |vec(H_i)^H vec(H_k)| / (||H_i||_F ||H_k||_F)
double channel_correlation(const CMat& h_i, const CMat& h_k);

GainMatrix build_gain_matrix(const std::vector<CMat>& channels, const FairnessParams& params);

/// N x K^2, column k * K + i = H_i w_k.
CMat build_xi(const std::vector<CMat>& channels, const CMat& w);

/// min sum_k ||F w_k - q_k||^2 s.t. ||W||_F^2 <= p_max, F = effective_channels (K x M),
/// solved as K ridge systems sharing one multiplier.
CMat solve_precoders(const CMat& f, const GainMatrix& gain, double p_max);

/// Element n = CMDPP(sum_i Xi(n, i) conj(q_tilde(i))).
DiscretePhaseVector solve_phase_cfm(const CMat& xi, const CVec& q_tilde, int bits);

/// ||F W - Q .* Q_nu||_F^2
double im_objective(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, const GainMatrix& gain);

enum class PhaseMethod { ipdd, cfm };

struct ImConfig {
  PhaseMethod phase_method = PhaseMethod::ipdd;
  int adapt_rounds = 10;  // gradient-ascent rounds on chi
  int inner_rounds = 20;  // AO rounds per main evaluation
  int probe_rounds = 5;   // AO rounds per gradient probe (warm started)
  double inner_rel_tol = 1e-6;
  IpddConfig ipdd;
};

struct ImSolution {
  CMat w;
  DiscretePhaseVector phi;
  GainMatrix gain;
  RVec rates;
  double sum_rate = 0.0;
  double jain = 0.0;
  std::vector<double> objective_trace;  // AO objective, [0] = start
};

/// Inner AO at fixed chi: W-step, phase step, Q_nu alignment, each rejected if it
/// increases the objective.
ImSolution im_alternate(const std::vector<CMat>& channels, const FairnessParams& params, double p_max,
                        double sigma2, const MultiuserStart& start, int rounds, double rel_tol,
                        PhaseMethod method, const IpddConfig& ipdd);

struct ImTraceRow {
  int iteration = 0;
  std::array<double, 5> chi{};
  double jain = 0.0;
  double sum_rate = 0.0;
  RVec rates;
};

struct ImResult {
  ImSolution best;            // highest-J main evaluation
  FairnessParams best_params;
  int best_iteration = 0;
  std::vector<ImTraceRow> trace;
};

ImResult run_im(const std::vector<CMat>& channels, const FairnessParams& params, double p_max, double sigma2,
                const ImConfig& cfg = {});

}  // namespace xlris
