// SPDX-License-Identifier: Apache-2.0

#include "xlris/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xlris {

double QuadraticForm::evaluate(const CVec& x) const {
  const cplx quad = x.dot(hessian * x);  // x^H H x
  const cplx lin = linear.dot(x);        // b^H x
  return quad.real() - 2.0 * lin.real() + constant;
}

void QuadraticForm::validate() const {
  if (hessian.rows() != hessian.cols() || hessian.rows() != linear.size()) {
    throw InvalidInput("QuadraticForm: hessian must be square and match the linear term");
  }
  const double scale = std::max(hessian.norm(), 1e-300);
  if ((hessian - hessian.adjoint()).norm() > 1e-12 * scale) {
    throw InvalidInput("QuadraticForm: hessian is not Hermitian");
  }
}

QuadraticForm QuadraticForm::from_residual(const CMat& a, const CVec& t) {
  QuadraticForm q;
  q.hessian = hermitian_part(a * a.adjoint());
  q.linear = a * t;
  q.constant = t.squaredNorm();
  return q;
}

RidgeSolution power_constrained_ridge(const CMat& d, const CMat& rhs, double p_max) {
  if (!(p_max > 0.0)) throw InvalidInput("power budget must be positive");
  if (d.rows() != d.cols() || d.rows() != rhs.rows()) {
    throw InvalidInput("power_constrained_ridge: dimension mismatch");
  }
  RidgeSolution out;
  out.x = CMat::Zero(rhs.rows(), rhs.cols());
  if (rhs.squaredNorm() == 0.0) return out;

  Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(d));
  const RVec lam = eig.eigenvalues().cwiseMax(0.0);
  const CMat& v = eig.eigenvectors();
  const CMat c = v.adjoint() * rhs;
  RVec weight(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) weight(i) = c.row(i).squaredNorm();

  const double lam_max = lam.maxCoeff();
  const double null_tol = 1e-12 * std::max(lam_max, 1e-300);
  const double weight_tol = 1e-24 * weight.sum();

  auto power_at = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double den = lam(i) + mu;
      if (den <= null_tol) continue;  // only reached for mu == 0 on null directions
      s += weight(i) / (den * den);
    }
    return s;
  };
  auto solve_at = [&](double mu) {
    CMat scaled = c;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double den = lam(i) + mu;
      if (den <= null_tol) {
        scaled.row(i).setZero();
      } else {
        scaled.row(i) /= den;
      }
    }
    return CMat(v * scaled);
  };

  bool unbounded_at_zero = false;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) <= null_tol && weight(i) > weight_tol) unbounded_at_zero = true;
  }
  if (!unbounded_at_zero && power_at(0.0) <= p_max) {
    out.x = solve_at(0.0);
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (power_at(hi) > p_max) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 400; ++it) {
    if (std::abs(power_at(hi) - p_max) <= 1e-8 * p_max) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (power_at(mid) > p_max ? lo : hi) = mid;
  }
  out.lambda = hi;
  out.x = solve_at(hi);
  return out;
}

LsSolution power_constrained_ls(const CMat& a, const CVec& target, double p_max) {
  if (a.rows() != target.size()) throw InvalidInput("power_constrained_ls: dimension mismatch");
  const auto r = power_constrained_ridge(a.adjoint() * a, a.adjoint() * target, p_max);
  return {r.x.col(0), r.lambda};
}

void IpddConfig::validate() const {
  if (!(penalty_init > 0.0)) throw InvalidInput("ipdd.penalty_init must be positive");
  if (!(penalty_decay > 0.0 && penalty_decay < 1.0)) throw InvalidInput("ipdd.penalty_decay must lie in (0, 1)");
  if (!(consensus_tol > 0.0)) throw InvalidInput("ipdd.consensus_tol must be positive");
  if (max_outer_iters < 1) throw InvalidInput("ipdd.max_outer_iters must be >= 1");
  if (bits < 1 || bits > 24) throw InvalidInput("ipdd.bits must lie in [1, 24]");
  if (polish_sweeps < 0) throw InvalidInput("ipdd.polish_sweeps must be >= 0");
}

namespace {

// Local search over the alphabet started from x: exact single-element updates
// (the CMDPP of the conditional linear term), then the best joint change of any
// element pair (alphabets of up to 8 levels). Only strict decreases are accepted, so the search terminates.
DiscretePhaseVector polish(const QuadraticForm& q, const DiscretePhaseVector& x, int sweeps) {
  const int bits = x.bits();
  const int levels = x.levels();
  const Eigen::Index n_el = static_cast<Eigen::Index>(x.size());
  std::vector<cplx> alphabet(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) alphabet[static_cast<std::size_t>(k)] = grid_point(k, bits);

  CVec val = x.values();
  std::vector<int> idx = x.indices();
  CVec g = q.hessian * val - q.linear;  // gradient-like term H x - b
  const double tol = 1e-13 * std::max(1.0, std::abs(q.evaluate(val)));
  const bool pairs = levels <= 8;  // pair moves cost levels^2 per pair

  auto apply = [&](Eigen::Index n, int k) {
    const cplx d = alphabet[static_cast<std::size_t>(k)] - val(n);
    g += q.hessian.col(n) * d;
    val(n) = alphabet[static_cast<std::size_t>(k)];
    idx[static_cast<std::size_t>(n)] = k;
  };
  // f change when x_n moves by d: 2 Re{conj(d) g_n} + H_nn |d|^2
  auto single = [&](Eigen::Index n, cplx d) {
    return 2.0 * (std::conj(d) * g(n)).real() + q.hessian(n, n).real() * std::norm(d);
  };

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index n = 0; n < n_el; ++n) {
      const cplx c = val(n) * q.hessian(n, n) - g(n);
      const int k = cmdpp_index(c, bits);
      if (k == idx[static_cast<std::size_t>(n)]) continue;
      if (single(n, alphabet[static_cast<std::size_t>(k)] - val(n)) < -tol) {
        apply(n, k);
        changed = true;
      }
    }
    for (Eigen::Index n = 0; pairs && n < n_el; ++n) {
      for (Eigen::Index m = n + 1; m < n_el; ++m) {
        double best = -tol;
        int bn = -1;
        int bm = -1;
        for (int kn = 0; kn < levels; ++kn) {
          if (kn == idx[static_cast<std::size_t>(n)]) continue;
          const cplx dn = alphabet[static_cast<std::size_t>(kn)] - val(n);
          const double fn = single(n, dn);
          for (int km = 0; km < levels; ++km) {
            if (km == idx[static_cast<std::size_t>(m)]) continue;
            const cplx dm = alphabet[static_cast<std::size_t>(km)] - val(m);
            const double delta = fn + single(m, dm) + 2.0 * (std::conj(dn) * q.hessian(n, m) * dm).real();
            if (delta < best) {
              best = delta;
              bn = kn;
              bm = km;
            }
          }
        }
        if (bn >= 0) {
          apply(n, bn);
          apply(m, bm);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return DiscretePhaseVector(bits, std::move(idx));
}

}  // namespace

namespace {

struct Spectral {
  RVec lam;
  CMat v;
  CVec b_hat;  // v^H b
};

IpddResult run_ipdd(const QuadraticForm& q, const Spectral& sp, const IpddConfig& cfg, double eta0,
                    const DiscretePhaseVector& init) {
  CVec zeta = init.values();
  CVec u = CVec::Zero(zeta.size());
  CVec phi = zeta;
  double eta = eta0;

  IpddResult res;
  DiscretePhaseVector best = init;
  double best_f = q.evaluate(zeta);
  for (int t = 0; t < cfg.max_outer_iters; ++t) {
    // (H + I / (2 eta)) phi = b + zeta / (2 eta) + u / 2, in the eigenbasis of H.
    const double rho = 1.0 / (2.0 * eta);
    CVec rhs = sp.b_hat + sp.v.adjoint() * (rho * zeta + 0.5 * u);
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs(i) /= (sp.lam(i) + rho);
    phi = sp.v * rhs;

    DiscretePhaseVector z = cmdpp_project(CVec(phi - eta * u), cfg.bits);
    zeta = z.values();
    const double f = q.evaluate(zeta);
    if (f < best_f) {
      best_f = f;
      best = z;
    }
    u += (zeta - phi) / eta;
    eta *= cfg.penalty_decay;

    res.consensus_gap = (phi - zeta).norm();
    res.gap_trace.push_back(res.consensus_gap);
    res.iterations = t + 1;
    if (res.consensus_gap <= cfg.consensus_tol) {
      res.converged = true;
      break;
    }
  }
  res.continuous = phi;
  res.raw_objective = q.evaluate(zeta);
  res.phases = cfg.polish_sweeps > 0 ? polish(q, best, cfg.polish_sweeps) : best;
  res.objective = q.evaluate(res.phases.values());
  return res;
}

}  // namespace

IpddResult ipdd_quadratic_discrete(const QuadraticForm& q, const IpddConfig& cfg,
                                   const DiscretePhaseVector& init) {
  q.validate();
  cfg.validate();
  if (static_cast<Eigen::Index>(init.size()) != q.linear.size()) {
    throw InvalidInput("ipdd: initial point has length " + std::to_string(init.size()) +
                       ", problem has " + std::to_string(q.linear.size()));
  }
  if (init.bits() != cfg.bits) throw InvalidInput("ipdd: initial point uses a different phase resolution");

  Eigen::SelfAdjointEigenSolver<CMat> eig(q.hessian);
  Spectral sp{eig.eigenvalues(), eig.eigenvectors(), eig.eigenvectors().adjoint() * q.linear};

  IpddResult res = run_ipdd(q, sp, cfg, cfg.penalty_init, init);
  if (!cfg.multistart) return res;

  // Minimum-norm minimiser of the relaxed quadratic, projected.
  const double lam_max = std::max(sp.lam.cwiseAbs().maxCoeff(), 1e-300);
  CVec c = sp.b_hat;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c(i) = sp.lam(i) > 1e-9 * lam_max ? c(i) / sp.lam(i) : cplx(0.0);
  }
  const DiscretePhaseVector relaxed = cmdpp_project(CVec(sp.v * c), cfg.bits);

  for (const double scale : {0.1, 1.0, 10.0, 100.0}) {
    for (const DiscretePhaseVector* start : {&init, &relaxed}) {
      if (scale == 1.0 && start == &init) continue;
      IpddResult r = run_ipdd(q, sp, cfg, scale * cfg.penalty_init, *start);
      if (r.objective < res.objective) res = std::move(r);
    }
  }
  return res;
}

Eigenpair principal_eigenpair(const CMat& hermitian, double tol, int max_iters) {
  const Eigen::Index n = hermitian.rows();
  if (n == 0 || hermitian.cols() != n) throw InvalidInput("principal_eigenpair: matrix must be square and non-empty");
  if (hermitian.norm() == 0.0) throw InvalidInput("principal_eigenpair: zero matrix");

  auto normalise = [](CVec x) {
    x.normalize();
    const double floor = 1e-8;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i)) > floor) {
        x *= std::conj(x(i)) / std::abs(x(i));
        break;
      }
    }
    return x;
  };

  CVec x = CVec::Zero(n);
  x(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) x(i) += 1e-3 * static_cast<double>(i + 1) / static_cast<double>(n);
  x = normalise(x);

  Eigenpair out;
  for (int it = 1; it <= max_iters; ++it) {
    CVec y = hermitian * x;
    if (y.norm() == 0.0) {
      // Start vector in the null space: restart along the next basis direction.
      x = CVec::Zero(n);
      x((it) % n) = 1.0;
      continue;
    }
    CVec next = normalise(y);
    const double change = (next - x).norm();
    x = std::move(next);
    if (change <= tol) {
      out.vector = x;
      out.value = x.dot(hermitian * x).real();
      out.iterations = it;
      return out;
    }
  }
  throw ConvergenceError("principal_eigenpair: no convergence after " + std::to_string(max_iters) + " iterations");
}

}  // namespace xlris
