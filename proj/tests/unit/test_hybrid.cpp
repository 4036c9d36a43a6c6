// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "xlris/hybrid.hpp"

#include <doctest.h>

using namespace xlris;

TEST_SUITE("hybrid") {

TEST_CASE("digital step matches the numpy projection coefficients") {
  CMat va(2, 2);
  va << 1, 1, 1, -1;
  CVec w(2);
  w << cplx(1, 2), cplx(0.5, -0.25);
  const auto loose = solve_digital(va, w, 100.0);
  CHECK(std::abs(loose.v(0) - cplx(0.75, 0.875)) < 1e-14);
  CHECK(std::abs(loose.v(1) - cplx(0.25, 1.125)) < 1e-14);
  CHECK(loose.lambda == 0.0);
  const auto tight = solve_digital(va, w, 1.0);
  CHECK(std::abs(tight.v(0) - cplx(0.32539568672798425, 0.3796283011826483)) < 1e-12);
  CHECK(std::abs(tight.v(1) - cplx(0.10846522890932808, 0.48809353009197637)) < 1e-12);
  CHECK((va * tight.v).squaredNorm() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rank-deficient analog falls back to minimum norm") {
  const CMat va = CMat::Ones(3, 2);
  CVec w(3);
  w << 1.0, 2.0, 3.0;
  const auto s = solve_digital(va, w, 100.0);
  CHECK(s.regularized);
  CHECK(std::abs(s.v(0) - s.v(1)) < 1e-12);
}

TEST_CASE("single RF chain with unit digital weight separates per element") {
  std::mt19937_64 rng(3);
  const CVec w = test::random_cvec(rng, 6);
  IpddConfig cfg;
  cfg.bits = 2;
  const auto va = solve_analog(CVec::Ones(1), w, cfg, DiscretePhaseVector::zeros(2, 6));
  CHECK(va == cmdpp_project(w, 2));
}

TEST_CASE("M = 2, one RF chain, 1 bit: matches exhaustive search") {
  CVec w(2);
  w << cplx(0.4, -0.9), cplx(-1.1, 0.2);
  CVec v(1);
  v << cplx(0.7, 0.3);
  IpddConfig cfg;
  cfg.bits = 1;
  const auto va = solve_analog(v, w, cfg, DiscretePhaseVector::zeros(1, 2));
  double best = 1e300;
  for (int code = 0; code < 4; ++code) {
    const CVec a = DiscretePhaseVector(1, {code & 1, code >> 1}).values();
    best = std::min(best, (a * v(0) - w).squaredNorm());
  }
  CHECK((va.values() * v(0) - w).squaredNorm() == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("factorization: monotone residual, feasible power, rich alphabet is near exact") {
  std::mt19937_64 rng(4);
  const CVec w = test::random_cvec(rng, 8);
  IpddConfig cfg;
  cfg.bits = 2;
  cfg.multistart = false;
  const auto h = hybrid_factorize(w, 3, cfg, 10.0, 10);
  for (std::size_t i = 1; i < h.residual_trace.size(); ++i) CHECK(h.residual_trace[i] <= h.residual_trace[i - 1]);
  CHECK(h.precoder().squaredNorm() <= 10.0 * (1 + 1e-9));
  CHECK((h.precoder() - w).squaredNorm() == doctest::Approx(h.residual));
  for (Eigen::Index i = 0; i < h.analog_matrix().size(); ++i) {
    CHECK(std::abs(std::abs(h.analog_matrix()(i)) - 1.0) < 1e-15);
  }
  cfg.bits = 12;
  const auto full = hybrid_factorize(w, 8, cfg, 10.0, 5);
  CHECK(full.residual <= 1e-3 * w.squaredNorm());
  CHECK_THROWS_AS(hybrid_factorize(w, 9, cfg, 10.0, 1), InvalidInput);
}

}
