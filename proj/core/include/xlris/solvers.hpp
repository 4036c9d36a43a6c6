// SPDX-License-Identifier: Apache-2.0
//
// Constrained-optimisation kernels shared by the codebook, multiuser and
// hybrid-precoding modules:
//
//  * power-constrained ridge / least squares, where the Lagrange multiplier of
//    the sum-power constraint is located by bisection;
//  * increasing-penalty dual decomposition (IPDD) for a Hermitian quadratic
//    over the v-bit constant-modulus alphabet.

#pragma once

#include "xlris/linalg.hpp"
#include "xlris/projections.hpp"

#include <vector>

namespace xlris {

/// f(x) = x^H H x - 2 Re{b^H x} + c.
struct QuadraticForm {
  CMat hessian;
  CVec linear;
  double constant = 0.0;

  [[nodiscard]] double evaluate(const CVec& x) const;
  void validate() const;

  /// ||A^H x - t||^2 written as a quadratic in x: H = A A^H, b = A t, c = ||t||^2.
  /// (Equivalently ||x^H A - t^H||^2.)
  static QuadraticForm from_residual(const CMat& a, const CVec& t);
};

struct RidgeSolution {
  CMat x;              // one column per right-hand side
  double lambda = 0.0; // shared multiplier of the sum-power constraint
};

/// Minimises sum_k x_k^H D x_k - 2 Re{r_k^H x_k} subject to sum_k ||x_k||^2 <= p_max
/// for Hermitian PSD D, i.e. x = (D + lambda I)^{-1} R with the smallest feasible
/// lambda >= 0. When lambda = 0 and D is singular the minimum-norm solution is used.
RidgeSolution power_constrained_ridge(const CMat& d, const CMat& rhs, double p_max);

struct LsSolution {
  CVec w;
  double lambda = 0.0;
};

/// argmin ||A w - target||^2 subject to ||w||^2 <= p_max.
LsSolution power_constrained_ls(const CMat& a, const CVec& target, double p_max);

struct IpddConfig {
  double penalty_init = 10.0;
  double penalty_decay = 0.8;
  double consensus_tol = 1e-4;
  int max_outer_iters = 200;
  int bits = 2;
  // Sweeps of element-wise exact minimisation applied to the returned iterate
  // (each element set to the CMDPP of its conditional linear term); 0 disables.
  int polish_sweeps = 20;
  // Also run from the projected relaxed minimiser and with the initial penalty
  // scaled by 0.1, 10 and 100; keep the best result.
  bool multistart = true;

  void validate() const;
};

struct IpddResult {
  DiscretePhaseVector phases;   // best discrete iterate, after polishing
  CVec continuous;              // the relaxed phi at exit
  double objective = 0.0;       // f(phases)
  double raw_objective = 0.0;   // f(zeta) of the last IPDD iterate, before polishing
  double consensus_gap = 0.0;   // ||phi - zeta||_2 at exit
  int iterations = 0;
  bool converged = false;
  std::vector<double> gap_trace;
};

/// IPDD on f over the v-bit alphabet, starting from `init`. The penalty schedule
/// acts on f in its given units. Each run returns the best zeta seen, polished,
/// so f(phases) <= f(init). The remaining fields describe the winning run.
IpddResult ipdd_quadratic_discrete(const QuadraticForm& q, const IpddConfig& cfg,
                                   const DiscretePhaseVector& init);

/// Largest eigenpair of a Hermitian PSD matrix by power iteration from a fixed
/// start vector. The eigenvector is unit-norm with its first non-negligible
/// entry real and positive. Throws ConvergenceError past `max_iters`.
struct Eigenpair {
  double value = 0.0;
  CVec vector;
  int iterations = 0;
};
Eigenpair principal_eigenpair(const CMat& hermitian, double tol = 1e-10, int max_iters = 100000);

}  // namespace xlris
