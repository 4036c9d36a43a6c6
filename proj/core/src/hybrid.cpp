// SPDX-License-Identifier: Apache-2.0

#include "xlris/hybrid.hpp"

#include <cmath>
#include <string>

namespace xlris {

CMat HybridPrecoder::analog_matrix() const { return unvec(analog.values(), antennas, rf_chains); }

DigitalSolution solve_digital(const CMat& analog, const CVec& w_star, double p_max) {
  if (analog.rows() != w_star.size()) throw InvalidInput("solve_digital: V_A rows must match the precoder length");
  if (!(p_max > 0.0)) throw InvalidInput("solve_digital: power budget must be positive");
  DigitalSolution out;
  const CMat gram = analog.adjoint() * analog;
  Eigen::LDLT<CMat> ldlt(gram);
  const double scale = std::max(gram.diagonal().real().maxCoeff(), 1e-300);
  const bool full_rank = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                         ldlt.vectorD().real().minCoeff() > 1e-10 * scale;
  if (full_rank) {
    out.v = ldlt.solve(analog.adjoint() * w_star);
  } else {
    out.v = analog.completeOrthogonalDecomposition().solve(w_star);
    out.regularized = true;
  }
  const double proj = (analog * out.v).squaredNorm();
  out.lambda = std::max(0.0, std::sqrt(proj / p_max) - 1.0);
  out.v /= (1.0 + out.lambda);
  return out;
}

DiscretePhaseVector solve_analog(const CVec& digital, const CVec& w_star, const IpddConfig& ipdd,
                                 const DiscretePhaseVector& init) {
  const Eigen::Index m = w_star.size();
  const Eigen::Index rf = digital.size();
  if (static_cast<Eigen::Index>(init.size()) != m * rf) throw InvalidInput("solve_analog: initial V_A has the wrong size");
  if (digital.squaredNorm() == 0.0) throw InvalidInput("solve_analog: digital precoder is zero");
  // ||(v^T kron I) x - w*||^2 with x = vec(V_A):
  //   hessian (conj(v) v^T) kron I, linear vec(w* v^H).
  QuadraticForm q;
  q.hessian = CMat::Zero(m * rf, m * rf);
  for (Eigen::Index i = 0; i < rf; ++i) {
    for (Eigen::Index j = 0; j < rf; ++j) {
      q.hessian.block(i * m, j * m, m, m).diagonal().setConstant(std::conj(digital(i)) * digital(j));
    }
  }
  q.linear = vec(CMat(w_star * digital.adjoint()));
  q.constant = w_star.squaredNorm();
  return ipdd_quadratic_discrete(q, ipdd, init).phases;
}

DiscretePhaseVector initial_analog(const CVec& w_star, Eigen::Index rf_chains, int bits) {
  const Eigen::Index m = w_star.size();
  CVec x(m * rf_chains);
  for (Eigen::Index j = 0; j < rf_chains; ++j) {
    for (Eigen::Index n = 0; n < m; ++n) {
      const double ang = kTwoPi * static_cast<double>(j * n) / static_cast<double>(m);
      const cplx base = w_star(n) == cplx(0.0) ? cplx(1.0) : w_star(n);
      x(j * m + n) = base * std::polar(1.0, ang);
    }
  }
  return cmdpp_project(x, bits);
}

HybridPrecoder hybrid_factorize(const CVec& w_star, Eigen::Index rf_chains, const IpddConfig& ipdd, double p_max,
                                int rounds) {
  const Eigen::Index m = w_star.size();
  if (m < 1) throw InvalidInput("hybrid: empty precoder");
  if (rf_chains < 1 || rf_chains > m) {
    throw InvalidInput("hybrid: M_RF must lie in [1, " + std::to_string(m) + "]");
  }
  if (rounds < 0) throw InvalidInput("hybrid: rounds must be >= 0");
  ipdd.validate();

  HybridPrecoder hp;
  hp.antennas = m;
  hp.rf_chains = rf_chains;
  hp.analog = initial_analog(w_star, rf_chains, ipdd.bits);
  auto residual = [&](const DiscretePhaseVector& a, const CVec& v) {
    return (unvec(a.values(), m, rf_chains) * v - w_star).squaredNorm();
  };

  DigitalSolution d = solve_digital(hp.analog_matrix(), w_star, p_max);
  hp.digital = d.v;
  hp.regularized = d.regularized;
  hp.residual = residual(hp.analog, hp.digital);
  hp.residual_trace.push_back(hp.residual);

  for (int r = 0; r < rounds; ++r) {
    if (hp.digital.squaredNorm() > 0.0) {
      const DiscretePhaseVector a = solve_analog(hp.digital, w_star, ipdd, hp.analog);
      CVec v = hp.digital;
      const double power = (unvec(a.values(), m, rf_chains) * v).squaredNorm();
      if (power > p_max) v *= std::sqrt(p_max / power);
      const double res = residual(a, v);
      if (res <= hp.residual) {
        hp.analog = a;
        hp.digital = v;
        hp.residual = res;
      }
    }
    d = solve_digital(hp.analog_matrix(), w_star, p_max);
    const double res = residual(hp.analog, d.v);
    if (res <= hp.residual) {
      hp.digital = d.v;
      hp.residual = res;
      hp.regularized = hp.regularized || d.regularized;
    }
    hp.residual_trace.push_back(hp.residual);
  }
  return hp;
}

}  // namespace xlris
