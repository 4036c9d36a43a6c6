// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "xlris/multiuser_im.hpp"

#include <doctest.h>

using namespace xlris;

TEST_SUITE("multiuser_im") {

TEST_CASE("channel correlation") {
  std::mt19937_64 rng(1);
  const CMat h = test::random_cmat(rng, 4, 2);
  CHECK(channel_correlation(h, h) == doctest::Approx(1.0));
  CHECK(channel_correlation(h, cplx(0.3, -2.0) * h) == doctest::Approx(1.0));
  CMat a = CMat::Zero(4, 2), b = CMat::Zero(4, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 2.0;
  CHECK(channel_correlation(a, b) == 0.0);
  CHECK_THROWS_AS(channel_correlation(a, CMat::Zero(4, 2)), InvalidInput);
}

TEST_CASE("gain matrix matches the independent numpy evaluation") {
  const std::vector<CMat> ch{test::det_matrix(3, 2, 0.4, 0.9), 2.0 * test::det_matrix(3, 2, 1.3, 0.2)};
  FairnessParams p;
  p.alpha = 1.5;
  p.beta = 0.2;
  const auto g = build_gain_matrix(ch, p);
  CHECK(g.q_amp(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(g.q_amp(0, 1) == doctest::Approx(0.286170013670092).epsilon(1e-12));
  CHECK(g.q_amp(1, 0) == doctest::Approx(0.09521282723096096).epsilon(1e-12));
  CHECK(g.q_amp(1, 1) == doctest::Approx(1.13922391509999).epsilon(1e-12));
  CHECK(g.q_phase.isApprox(CMat::Ones(2, 2)));
}

TEST_CASE("gain matrix properties") {
  std::mt19937_64 rng(2);
  const CMat base = test::random_cmat(rng, 5, 2);
  FairnessParams p = FairnessParams::initial(4.0, 3);
  CHECK(p.alpha == doctest::Approx(2.0 / 3.0));
  // Equal norms: every diagonal is alpha.
  const std::vector<CMat> eq{base, base * cplx(0, 1), base * cplx(-1, 0)};
  const auto g = build_gain_matrix(eq, p);
  for (int k = 0; k < 3; ++k) CHECK(g.q_amp(k, k) == doctest::Approx(p.alpha));
  // Diagonal non-increasing in channel norm; weakest user gets exactly alpha.
  const std::vector<CMat> ch{base, 2.0 * test::random_cmat(rng, 5, 2), 0.5 * test::random_cmat(rng, 5, 2)};
  const auto g2 = build_gain_matrix(ch, p);
  std::vector<std::pair<double, double>> nd;
  for (int k = 0; k < 3; ++k) nd.emplace_back(ch[k].norm(), g2.q_amp(k, k));
  std::sort(nd.begin(), nd.end());
  CHECK(nd[0].second == doctest::Approx(p.alpha));
  CHECK(nd[1].second <= nd[0].second);
  CHECK(nd[2].second <= nd[1].second);
  p.beta = 0.0;
  const auto g3 = build_gain_matrix(ch, p);
  CHECK(g3.q_amp(0, 1) == 0.0);
  CHECK(g3.q_amp(2, 1) == 0.0);
}

TEST_CASE("xi layout and target vector") {
  std::mt19937_64 rng(3);
  const std::vector<CMat> ch{test::random_cmat(rng, 4, 2), test::random_cmat(rng, 4, 2)};
  const CMat w = test::random_cmat(rng, 2, 2);
  const CMat xi = build_xi(ch, w);
  CHECK((xi.col(1 * 2 + 0) - ch[0] * w.col(1)).norm() < 1e-14);
  CHECK((xi.col(0 * 2 + 1) - ch[1] * w.col(0)).norm() < 1e-14);
}

TEST_CASE("precoders: block solve equals per-column solve, power feasible") {
  std::mt19937_64 rng(4);
  const CMat f = test::random_cmat(rng, 3, 4);
  GainMatrix g;
  g.q_amp = RMat::Random(3, 3).cwiseAbs() * 10.0;
  g.q_phase = CMat::Ones(3, 3);
  const CMat w = solve_precoders(f, g, 0.8);
  CHECK(w.squaredNorm() <= 0.8 * (1 + 1e-9));
  // Full (I kron F) system.
  CMat big = CMat::Zero(9, 12);
  for (int k = 0; k < 3; ++k) big.block(3 * k, 4 * k, 3, 4) = f;
  const auto ls = power_constrained_ls(big, g.target(), 0.8);
  CHECK((vec(w) - ls.w).norm() < 1e-10 * (1.0 + ls.w.norm()));
  GainMatrix zero{RMat::Zero(3, 3), CMat::Ones(3, 3)};
  CHECK(solve_precoders(f, zero, 0.8).norm() == 0.0);
}

TEST_CASE("cfm identity and exhaustive match on orthogonal rows") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const CMat xi = test::random_cmat(rng, 7, 4);
    const CVec q = test::random_cvec(rng, 4);
    const auto p = solve_phase_cfm(xi, q, 3);
    CHECK(p.indices() == cmdpp_project(CVec(xi * q.conjugate()), 3).indices());
    CHECK(solve_phase_cfm(xi, CVec(2.5 * q), 3) == p);
  }
  // N = 4, K = 1, v = 1: one nonzero row of Xi per element.
  CMat xi = CMat::Zero(4, 1);
  xi << cplx(0.3, 1.0), cplx(-2.0, 0.1), cplx(0.5, -0.7), cplx(-0.1, -1.2);
  CVec q(1);
  q << std::polar(1.5, 0.4);
  const auto p = solve_phase_cfm(xi, q, 1);
  double best = 1e300;
  std::vector<int> arg;
  for (int code = 0; code < 16; ++code) {
    std::vector<int> idx{code & 1, (code >> 1) & 1, (code >> 2) & 1, (code >> 3) & 1};
    const CVec phi = DiscretePhaseVector(1, idx).values();
    // Per-element residual: sum_n |conj(phi_n) Xi_n - q / N|^2.
    double f = 0.0;
    for (int n = 0; n < 4; ++n) f += std::norm(std::conj(phi(n)) * xi(n, 0) - q(0) / 4.0);
    if (f < best) {
      best = f;
      arg = idx;
    }
  }
  CHECK(p.indices() == arg);
}

TEST_CASE("fairness parameters validate") {
  FairnessParams p;
  p.step = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = FairnessParams{};
  p.set_chi({0.5, 0.1, 1.0, 2.0, 3.0});
  CHECK(p.gamma3 == 3.0);
}

TEST_CASE("run_im: jain in range, zero step keeps chi constant") {
  std::mt19937_64 rng(7);
  std::vector<CMat> ch;
  for (int k = 0; k < 3; ++k) ch.push_back(test::random_cmat(rng, 8, 3));
  FairnessParams p = FairnessParams::initial(2.0, 3);
  p.step = 0.0;
  ImConfig cfg;
  cfg.adapt_rounds = 3;
  cfg.inner_rounds = 5;
  cfg.probe_rounds = 2;
  cfg.ipdd.bits = 2;
  cfg.ipdd.multistart = false;
  const auto r = run_im(ch, p, 2.0, 0.1, cfg);
  REQUIRE(r.trace.size() >= 2);
  for (const auto& row : r.trace) {
    CHECK(row.chi == r.trace.front().chi);
    CHECK(row.jain >= 1.0 / 3.0 - 1e-12);
    CHECK(row.jain <= 1.0 + 1e-12);
  }
  CHECK(r.trace[1].jain == doctest::Approx(r.trace.back().jain));
  CHECK(r.best.w.squaredNorm() <= 2.0 * (1 + 1e-9));
  const RVec rates = achievable_rates(ch, r.best.w, r.best.phi.values(), 0.1);
  CHECK((rates - r.best.rates).norm() < 1e-12);
  for (std::size_t i = 1; i < r.best.objective_trace.size(); ++i) {
    CHECK(r.best.objective_trace[i] <= r.best.objective_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("identical channels with beta = 0 give near-equal rates under CFM") {
  std::mt19937_64 rng(8);
  const CMat h = test::random_cmat(rng, 8, 3);
  const std::vector<CMat> ch{h, h, h};
  FairnessParams p = FairnessParams::initial(2.0, 3);
  p.beta = 0.0;
  p.step = 0.0;
  ImConfig cfg;
  cfg.phase_method = PhaseMethod::cfm;
  cfg.adapt_rounds = 1;
  cfg.ipdd.bits = 3;
  const auto r = run_im(ch, p, 2.0, 0.1, cfg);
  const auto g = build_gain_matrix(ch, p);
  CHECK(g.q_amp(0, 0) == doctest::Approx(g.q_amp(2, 2)));
  CHECK(r.best.jain >= 0.95);
}

}
