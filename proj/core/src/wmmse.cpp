// SPDX-License-Identifier: Apache-2.0

#include "xlris/wmmse.hpp"

#include "xlris/rates.hpp"

#include <cmath>
#include <string>

namespace xlris {

namespace {

CVec dominant_right_vector(const CMat& h) {
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinV);
  CVec u = svd.matrixV().col(0);
  // Fix the free phase so the result is reproducible across platforms.
  Eigen::Index idx = 0;
  u.cwiseAbs().maxCoeff(&idx);
  if (std::abs(u(idx)) > 0.0) u *= std::conj(u(idx)) / std::abs(u(idx));
  return u;
}

CMat matched_filters(const std::vector<CMat>& channels, const CVec& phi, double p_max) {
  const CMat f = effective_channels(channels, phi);
  const double per_user = p_max / static_cast<double>(channels.size());
  CMat w(f.cols(), f.rows());
  for (Eigen::Index k = 0; k < f.rows(); ++k) {
    const double n = f.row(k).norm();
    if (n > 0.0) {
      w.col(k) = std::sqrt(per_user) * f.row(k).adjoint() / n;
    } else {
      w.col(k).setZero();
      w(0, k) = std::sqrt(per_user);
    }
  }
  return w;
}

void check_channels(const std::vector<CMat>& channels) {
  if (channels.empty()) throw InvalidInput("wmmse: no users");
  for (const auto& h : channels) {
    if (h.rows() != channels.front().rows() || h.cols() != channels.front().cols()) {
      throw InvalidInput("wmmse: all user channels must share one shape");
    }
  }
}

}  // namespace

MultiuserStart multiuser_start(const std::vector<CMat>& channels, double p_max, int bits) {
  check_channels(channels);
  if (!(p_max > 0.0)) throw InvalidInput("multiuser_start: power budget must be positive");
  CVec acc = CVec::Zero(channels.front().rows());
  for (const auto& h : channels) acc += h * dominant_right_vector(h);
  MultiuserStart s;
  s.phi = cmdpp_project(acc, bits);
  s.w = matched_filters(channels, s.phi.values(), p_max);
  return s;
}

void wmmse_receivers(const std::vector<CMat>& channels, const CMat& w, const CVec& phi, double sigma2, CVec& v,
                     RVec& rho) {
  const CMat a = effective_channels(channels, phi) * w;
  const Eigen::Index k_users = a.rows();
  v.resize(k_users);
  rho.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    double interference = 0.0;
    for (Eigen::Index i = 0; i < k_users; ++i) {
      if (i != k) interference += std::norm(a(k, i));
    }
    const double total = std::norm(a(k, k)) + interference + sigma2;
    v(k) = a(k, k) / total;
    // 1 - conj(v) a_kk = (interference + sigma2) / total, written without the
    // subtraction, which loses every digit once the SINR approaches 1e16.
    rho(k) = total / (interference + sigma2);
  }
}

WmmseState wmmse_sum_rate(const std::vector<CMat>& channels, double p_max, double sigma2,
                          const MultiuserStart& init, const WmmseConfig& cfg) {
  check_channels(channels);
  if (!(p_max > 0.0)) throw InvalidInput("wmmse: power budget must be positive");
  if (!(sigma2 > 0.0)) throw InvalidInput("wmmse: noise power must be positive");
  if (cfg.max_iters < 0) throw InvalidInput("wmmse: max_iters must be >= 0");
  const Eigen::Index k_users = static_cast<Eigen::Index>(channels.size());
  if (init.w.cols() != k_users || init.w.rows() != channels.front().cols() ||
      static_cast<Eigen::Index>(init.phi.size()) != channels.front().rows()) {
    throw InvalidInput("wmmse: initial point does not match the channel dimensions");
  }
  if (cfg.optimise_phases && init.phi.bits() != cfg.ipdd.bits) {
    throw InvalidInput("wmmse: initial phases use a different resolution than the IPDD configuration");
  }

  WmmseState st;
  st.w_matrix = init.w;
  st.ris_phases = init.phi;
  auto sum_rate = [&](const CMat& w, const CVec& phi) {
    return achievable_rates(channels, w, phi, sigma2).sum();
  };
  double rate = sum_rate(st.w_matrix, st.ris_phases.values());
  st.sum_rate_trace.push_back(rate);
  st.rate_trace.push_back(achievable_rates(channels, st.w_matrix, st.ris_phases.values(), sigma2));
  wmmse_receivers(channels, st.w_matrix, st.ris_phases.values(), sigma2, st.v_aux, st.rho_aux);
  if (cfg.record_iterates) st.iterates.push_back({st.v_aux, st.rho_aux, st.w_matrix, st.ris_phases});

  const Eigen::Index m = channels.front().cols();
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double before = rate;
    CVec phi = st.ris_phases.values();
    const CMat f = effective_channels(channels, phi);

    // W-step: w_k = (D + lambda I)^{-1} d_k with
    //   D = sum_k rho_k |v_k|^2 f_k^H f_k,  d_k = rho_k v_k f_k^H.
    CMat d = CMat::Zero(m, m);
    CMat rhs(m, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
      const CVec fk = f.row(k).adjoint();
      d += st.rho_aux(k) * std::norm(st.v_aux(k)) * (fk * fk.adjoint());
      rhs.col(k) = st.rho_aux(k) * st.v_aux(k) * fk;
    }
    const CMat w_new = power_constrained_ridge(hermitian_part(d), rhs, p_max).x;
    const double rate_w = sum_rate(w_new, phi);
    if (rate_w >= rate) {
      st.w_matrix = w_new;
      rate = rate_w;
    }
    wmmse_receivers(channels, st.w_matrix, phi, sigma2, st.v_aux, st.rho_aux);

    if (cfg.optimise_phases) {
      // phi-step: minimise phi^H Dh phi - 2 Re{dh^H phi} with
      //   Dh = sum_k rho_k |v_k|^2 H_k W W^H H_k^H,  dh = sum_k rho_k conj(v_k) H_k w_k.
      const Eigen::Index n = phi.size();
      QuadraticForm q;
      q.hessian = CMat::Zero(n, n);
      q.linear = CVec::Zero(n);
      for (Eigen::Index k = 0; k < k_users; ++k) {
        const CMat hw = channels[static_cast<std::size_t>(k)] * st.w_matrix;  // N x K
        q.hessian += st.rho_aux(k) * std::norm(st.v_aux(k)) * (hw * hw.adjoint());
        q.linear += st.rho_aux(k) * std::conj(st.v_aux(k)) * hw.col(k);
      }
      q.hessian = hermitian_part(q.hessian);
      const IpddResult res = ipdd_quadratic_discrete(q, cfg.ipdd, st.ris_phases);
      const double rate_phi = sum_rate(st.w_matrix, res.phases.values());
      if (rate_phi >= rate) {
        st.ris_phases = res.phases;
        rate = rate_phi;
      }
      wmmse_receivers(channels, st.w_matrix, st.ris_phases.values(), sigma2, st.v_aux, st.rho_aux);
    }

    st.sum_rate_trace.push_back(rate);
    st.rate_trace.push_back(achievable_rates(channels, st.w_matrix, st.ris_phases.values(), sigma2));
    if (cfg.record_iterates) st.iterates.push_back({st.v_aux, st.rho_aux, st.w_matrix, st.ris_phases});
    st.iterations = it + 1;
    if (rate - before <= cfg.rel_tol * std::max(std::abs(before), 1e-300)) break;
  }
  return st;
}

}  // namespace xlris
