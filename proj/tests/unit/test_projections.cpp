// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "xlris/projections.hpp"

#include <doctest.h>

using namespace xlris;

TEST_SUITE("projections") {

TEST_CASE("cmdpp examples") {
  CHECK(cmdpp_index(std::polar(2.0, 0.3), 2) == 0);
  CHECK(cmdpp_index(std::polar(1.0, kPi / 4), 2) == 1);  // midpoint goes to the larger angle
  CHECK(cmdpp_index(cplx(0.0, 0.0), 3) == 0);
  CHECK(cmdpp_index(std::polar(1.0, -0.1), 1) == 0);
  CHECK(cmdpp_index(std::polar(1.0, 3.0), 1) == 1);
}

TEST_CASE("cmdpp is scale invariant and matches the CMDPP-oracle cfm values") {
  // Oracle: element-wise nearest grid point of Xi conj(q) for the det instance.
  const CMat xi = test::det_matrix(5, 4, 0.8, 0.45);
  const CVec q = test::det_matrix(4, 1, 0.2, 1.7).col(0);
  const CVec s = xi * q.conjugate();
  const std::vector<int> v2{3, 1, 1, 0, 2}, v3{7, 1, 1, 0, 4};
  CHECK(cmdpp_project(s, 2).indices() == v2);
  CHECK(cmdpp_project(s, 3).indices() == v3);
  CHECK(cmdpp_project(CVec(3.7 * s), 3).indices() == v3);
}

TEST_CASE("discrete phase vector values lie on the grid") {
  const DiscretePhaseVector p(3, {0, 1, 7});
  CHECK(std::abs(p.value(1) - std::polar(1.0, kTwoPi / 8)) < 1e-15);
  CHECK(p.values().cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK_THROWS_AS(DiscretePhaseVector(2, {4}), InvalidInput);
  CHECK(DiscretePhaseVector::zeros(2, 4).values().isApprox(CVec::Ones(4)));
}

TEST_CASE("phase alignment") {
  CHECK(phase_align(cplx(0, 0)) == cplx(1, 0));
  CHECK(std::abs(phase_align(cplx(0, -3)) - cplx(0, -1)) < 1e-15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int t = 0; t < 200; ++t) {
    const cplx e(std::normal_distribution<double>(0, 1)(rng), std::normal_distribution<double>(0, 1)(rng));
    const double best = std::norm(phase_align(e) - e);
    for (int u = 0; u < 50; ++u) CHECK(best <= std::norm(std::polar(1.0, ang(rng)) - e) + 1e-15);
  }
}

}
