// SPDX-License-Identifier: Apache-2.0

#include "xlris/multiuser_im.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xlris {

FairnessParams FairnessParams::initial(double p_max, int users) {
  if (!(p_max > 0.0) || users < 1) throw InvalidInput("FairnessParams::initial: need p_max > 0 and K >= 1");
  FairnessParams p;
  p.alpha = std::sqrt(p_max) / users;
  return p;
}

void FairnessParams::set_chi(const std::array<double, 5>& c) {
  alpha = c[0];
  beta = c[1];
  gamma1 = c[2];
  gamma2 = c[3];
  gamma3 = c[4];
}

void FairnessParams::validate() const {
  for (double x : chi()) {
    if (!std::isfinite(x)) throw InvalidInput("fairness parameters must be finite");
  }
  if (alpha < 0.0 || beta < 0.0) throw InvalidInput("fairness: alpha and beta must be >= 0");
  if (!(eps_h > 0.0)) throw InvalidInput("fairness: eps_h must be positive");
  if (!(step >= 0.0)) throw InvalidInput("fairness: step must be >= 0");
  if (!(perturb > 0.0)) throw InvalidInput("fairness: perturb must be positive");
}

CVec GainMatrix::target() const { return vec(CMat(q_amp.cast<cplx>().cwiseProduct(q_phase))); }

double channel_correlation(const CMat& h_i, const CMat& h_k) {
  if (h_i.rows() != h_k.rows() || h_i.cols() != h_k.cols()) throw InvalidInput("channel_correlation: shape mismatch");
  const double ni = h_i.norm();
  const double nk = h_k.norm();
  if (ni == 0.0 || nk == 0.0) throw InvalidInput("channel_correlation: zero-norm channel");
  const cplx inner = (h_i.array().conjugate() * h_k.array()).sum();
  return std::min(1.0, std::abs(inner) / (ni * nk));
}

GainMatrix build_gain_matrix(const std::vector<CMat>& channels, const FairnessParams& params) {
  params.validate();
  const auto k_users = static_cast<Eigen::Index>(channels.size());
  if (k_users < 1) throw InvalidInput("build_gain_matrix: no users");
  RVec norms(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) norms(k) = channels[static_cast<std::size_t>(k)].norm();
  if ((norms.array() <= 0.0).any()) throw InvalidInput("build_gain_matrix: zero-norm channel");
  const double weakest = norms.minCoeff();

  GainMatrix g;
  g.q_amp.resize(k_users, k_users);
  g.q_phase = CMat::Ones(k_users, k_users);
  for (Eigen::Index i = 0; i < k_users; ++i) {
    for (Eigen::Index k = 0; k < k_users; ++k) {
      if (i == k) {
        g.q_amp(k, k) = params.alpha * std::pow(weakest / norms(k), params.gamma1);
      } else {
        const double rho = channel_correlation(channels[static_cast<std::size_t>(i)], channels[static_cast<std::size_t>(k)]);
        g.q_amp(i, k) = params.beta * std::pow(norms(k) / (norms(i) + params.eps_h), params.gamma2) *
                        std::pow(1.0 + rho, -params.gamma3);
      }
    }
  }
  return g;
}

CMat build_xi(const std::vector<CMat>& channels, const CMat& w) {
  const auto k_users = static_cast<Eigen::Index>(channels.size());
  if (k_users == 0 || w.cols() != k_users) throw InvalidInput("build_xi: precoder/user count mismatch");
  CMat xi(channels.front().rows(), k_users * k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    for (Eigen::Index i = 0; i < k_users; ++i) {
      xi.col(k * k_users + i) = channels[static_cast<std::size_t>(i)] * w.col(k);
    }
  }
  return xi;
}

CMat solve_precoders(const CMat& f, const GainMatrix& gain, double p_max) {
  if (gain.q_amp.rows() != f.rows() || gain.q_amp.cols() != f.rows()) {
    throw InvalidInput("solve_precoders: gain matrix must be K x K with K = rows of F");
  }
  const CMat target = gain.q_amp.cast<cplx>().cwiseProduct(gain.q_phase);
  return power_constrained_ridge(hermitian_part(f.adjoint() * f), f.adjoint() * target, p_max).x;
}

DiscretePhaseVector solve_phase_cfm(const CMat& xi, const CVec& q_tilde, int bits) {
  if (xi.cols() != q_tilde.size()) throw InvalidInput("solve_phase_cfm: Xi columns must match q_tilde length");
  return cmdpp_project(CVec(xi * q_tilde.conjugate()), bits);
}

double im_objective(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, const GainMatrix& gain) {
  const CMat resp = effective_channels(channels, phi) * w;
  return (resp - gain.q_amp.cast<cplx>().cwiseProduct(gain.q_phase)).squaredNorm();
}

ImSolution im_alternate(const std::vector<CMat>& channels, const FairnessParams& params, double p_max,
                        double sigma2, const MultiuserStart& start, int rounds, double rel_tol,
                        PhaseMethod method, const IpddConfig& ipdd) {
  if (rounds < 0) throw InvalidInput("im: AO round count must be >= 0");
  ImSolution s;
  s.gain = build_gain_matrix(channels, params);
  s.w = start.w;
  s.phi = start.phi;
  double f = im_objective(channels, s.w, s.phi.values(), s.gain);
  s.objective_trace.push_back(f);

  for (int r = 0; r < rounds; ++r) {
    const double before = f;

    const CMat w = solve_precoders(effective_channels(channels, s.phi.values()), s.gain, p_max);
    const double f_w = im_objective(channels, w, s.phi.values(), s.gain);
    if (f_w <= f) {
      s.w = w;
      f = f_w;
    }

    const CMat xi = build_xi(channels, s.w);
    const CVec qt = s.gain.target();
    DiscretePhaseVector phi;
    if (method == PhaseMethod::cfm) {
      phi = solve_phase_cfm(xi, qt, s.phi.bits());
    } else {
      phi = ipdd_quadratic_discrete(QuadraticForm::from_residual(xi, qt.conjugate()), ipdd, s.phi).phases;
    }
    const double f_phi = im_objective(channels, s.w, phi.values(), s.gain);
    if (f_phi <= f) {
      s.phi = std::move(phi);
      f = f_phi;
    }

    const CMat resp = effective_channels(channels, s.phi.values()) * s.w;
    GainMatrix aligned = s.gain;
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
      for (Eigen::Index k = 0; k < resp.cols(); ++k) aligned.q_phase(i, k) = phase_align(resp(i, k));
    }
    const double f_q = im_objective(channels, s.w, s.phi.values(), aligned);
    if (f_q <= f) {
      s.gain = std::move(aligned);
      f = f_q;
    }

    s.objective_trace.push_back(f);
    if (before - f <= rel_tol * std::max(before, 1e-300)) break;
  }
  s.rates = achievable_rates(channels, s.w, s.phi.values(), sigma2);
  s.sum_rate = s.rates.sum();
  s.jain = s.rates.squaredNorm() > 0.0 ? jain_index(s.rates) : 0.0;
  return s;
}

ImResult run_im(const std::vector<CMat>& channels, const FairnessParams& params, double p_max, double sigma2,
                const ImConfig& cfg) {
  params.validate();
  if (cfg.adapt_rounds < 1) throw InvalidInput("im: adapt_rounds must be >= 1");
  if (cfg.inner_rounds < 1 || cfg.probe_rounds < 1) throw InvalidInput("im: AO round counts must be >= 1");
  const MultiuserStart cold = multiuser_start(channels, p_max, cfg.ipdd.bits);

  ImResult out;
  FairnessParams p = params;
  for (int r = 0; r < cfg.adapt_rounds; ++r) {
    ImSolution sol;
    try {
      sol = im_alternate(channels, p, p_max, sigma2, cold, cfg.inner_rounds, cfg.inner_rel_tol, cfg.phase_method,
                         cfg.ipdd);
    } catch (const std::exception& e) {
      throw std::runtime_error("im: adaptation round " + std::to_string(r) + ": " + e.what());
    }
    out.trace.push_back({r, p.chi(), sol.jain, sol.sum_rate, sol.rates});
    if (r == 0 || sol.jain > out.best.jain) {
      out.best = sol;
      out.best_params = p;
      out.best_iteration = r;
    }
    if (r + 1 == cfg.adapt_rounds) break;

    // Forward differences, every probe warm started from the incumbent with the
    // same short AO budget as the reference point.
    const MultiuserStart warm{sol.w, sol.phi};
    auto probe = [&](const FairnessParams& q) {
      return im_alternate(channels, q, p_max, sigma2, warm, cfg.probe_rounds, cfg.inner_rel_tol, cfg.phase_method,
                          cfg.ipdd)
          .jain;
    };
    const double j_ref = probe(p);
    const auto chi = p.chi();
    std::array<double, 5> grad{};
    for (std::size_t j = 0; j < chi.size(); ++j) {
      const double delta = j < 2 ? p.perturb * std::max(std::abs(chi[j]), 1e-3) : p.perturb;
      auto shifted = chi;
      shifted[j] += delta;
      FairnessParams q = p;
      q.set_chi(shifted);
      grad[j] = (probe(q) - j_ref) / delta;
    }
    auto next = chi;
    for (std::size_t j = 0; j < chi.size(); ++j) next[j] += p.step * grad[j];
    next[0] = std::max(next[0], 0.0);
    next[1] = std::max(next[1], 0.0);
    p.set_chi(next);
  }
  return out;
}

}  // namespace xlris
