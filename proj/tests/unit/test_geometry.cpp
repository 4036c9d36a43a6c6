// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "xlris/geometry.hpp"

#include <doctest.h>

using namespace xlris;

TEST_SUITE("geometry") {

TEST_CASE("channel entries match the independent distance oracle") {
  SystemGeometry g = SystemGeometry::half_wavelength(0.03, 4, 2, 2);
  const CMat G = bs_ris_channel(g);
  CHECK(std::abs(G(0, 0) - cplx(-0.1819206388946329, 0.4980272225907334)) < 1e-12);
  CHECK(std::abs(G(5, 1) - cplx(-0.1819206388946329, 0.4980272225907334)) < 1e-12);
  CHECK(std::abs(G(3, 0) - cplx(0.5179226644273478, 0.11148030692643394)) < 1e-12);
  const CVec h = ris_user_channel(g, {0.9, 0.0, 30.0});
  CHECK(std::abs(h(0) - cplx(-0.9848598900258473, -0.17060558425834543)) < 1e-12);
  CHECK(std::abs(h(7) - cplx(-0.8982534757819374, -0.4385040475456831)) < 1e-12);
}

TEST_CASE("paper-size BS channel shape and amplitudes") {
  const auto g = SystemGeometry::half_wavelength(0.03, 128, 4, 4);
  const CMat G = bs_ris_channel(g);
  CHECK(G.rows() == 512);
  CHECK(G.cols() == 4);
  CHECK(G.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("on-axis single element has unit amplitude") {
  SystemGeometry g = SystemGeometry::half_wavelength(0.03, 1, 1, 1);
  g.bs_position_m = {0.0, 0.0, -7.0};
  const CMat G = bs_ris_channel(g);
  CHECK(std::abs(G(0, 0)) == doctest::Approx(1.0));
  CHECK(std::arg(G(0, 0)) == doctest::Approx(std::arg(std::polar(1.0, -kTwoPi * 7.0 / 0.03))));
}

TEST_CASE("user channel: amplitude D0/D and phase -2 pi D / lambda per element") {
  const auto g = SystemGeometry::half_wavelength(0.03, 8, 3, 1);
  const Point3 u{30 * 0.03, 0.0, 1000 * 0.03};
  const CVec h = ris_user_channel(g, u);
  for (int n2 = 1; n2 <= 3; ++n2) {
    for (int n1 = 1; n1 <= 8; ++n1) {
      const double dist = distance(g.element_position(n1, n2), u);
      const cplx v = h((n2 - 1) * 8 + (n1 - 1));
      CHECK(std::abs(v) == doctest::Approx(u.z / dist).epsilon(1e-12));
      CHECK(std::abs(v / std::abs(v) - std::polar(1.0, -kTwoPi * dist / 0.03)) < 1e-9);
      CHECK(std::abs(v) <= 1.0);
    }
  }
}

TEST_CASE("mirrored users give n1-reversed channels") {
  const auto g = SystemGeometry::half_wavelength(0.03, 6, 2, 1);
  const CVec a = ris_user_channel(g, {1.2, 0.0, 20.0});
  const CVec b = ris_user_channel(g, {-1.2, 0.0, 20.0});
  for (int n2 = 0; n2 < 2; ++n2) {
    for (int n1 = 0; n1 < 6; ++n1) CHECK(std::abs(a(n2 * 6 + n1) - b(n2 * 6 + (5 - n1))) < 1e-12);
  }
}

TEST_CASE("cascaded channel") {
  CMat G(2, 1);
  G << cplx(1, 0), cplx(0, 1);
  CVec h(2);
  h << cplx(0, 1), cplx(1, 0);
  const CMat c = cascaded_channel(G, h);
  CHECK(std::abs(c(0, 0) - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(c(1, 0) - cplx(0, 1)) < 1e-15);
  CHECK((cascaded_channel(G, CVec::Ones(2)) - G).norm() == 0.0);
  CHECK_THROWS_AS(cascaded_channel(G, CVec::Ones(3)), InvalidInput);

  std::mt19937_64 rng(3);
  const CMat g2 = test::random_cmat(rng, 5, 3);
  const CVec h2 = test::random_cvec(rng, 5), phi = test::random_cvec(rng, 5), w = test::random_cvec(rng, 3);
  const CVec gw = g2 * w;
  cplx expect = 0.0;
  for (int n = 0; n < 5; ++n) expect += std::conj(phi(n)) * std::conj(h2(n)) * gw(n);
  CHECK(std::abs(phi.dot(cascaded_channel(g2, h2) * w) - expect) < 1e-12);
}

TEST_CASE("rayleigh distance") {
  CHECK(rayleigh_distance(1.5, 0.03) == doctest::Approx(150.0).epsilon(1e-15));
  CHECK(rayleigh_distance(1.9, 0.03) == doctest::Approx(240.66666666666666).epsilon(1e-14));
  CHECK_THROWS_AS(rayleigh_distance(0.0, 0.03), InvalidInput);
  CHECK_THROWS_AS(rayleigh_distance(1.0, -1.0), InvalidInput);
}

TEST_CASE("invalid geometry is rejected") {
  auto g = SystemGeometry::half_wavelength(0.03, 4, 4, 2);
  g.bs_position_m.z = 0.0;
  CHECK_THROWS_AS(bs_ris_channel(g), InvalidInput);
  CHECK_THROWS_AS(ris_user_channel(SystemGeometry{}, {1.0, 0.0, 0.0}), InvalidInput);
  auto g2 = SystemGeometry::half_wavelength(0.03, 4, 4, 2);
  g2.element_spacing_m = 0.02;
  CHECK_THROWS_AS(g2.validate(), InvalidInput);
}

TEST_CASE("channel set rows are conj(h) scaled rows of G") {
  const auto g = SystemGeometry::half_wavelength(0.03, 4, 2, 3);
  const auto set = make_channel_set(g, {{1.0, 0.0, 10.0}, {-2.0, 0.0, 12.0}});
  REQUIRE(set.cascaded.size() == 2);
  for (int k = 0; k < 2; ++k) {
    for (int n = 0; n < 8; ++n) {
      CHECK((set.cascaded[k].row(n) - std::conj(set.h_users[k](n)) * set.g_bs_ris.row(n)).norm() < 1e-15);
    }
  }
  CHECK(fingerprint(g) == fingerprint(g));
  auto g2 = g;
  g2.n1 = 5;
  CHECK(fingerprint(g) != fingerprint(g2));
}

}
