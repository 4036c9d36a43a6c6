// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "xlris/codebook.hpp"
#include "xlris/codebook_io.hpp"

#include <doctest.h>

using namespace xlris;

namespace {

SystemGeometry small_geom() { return SystemGeometry::half_wavelength(0.03, 8, 2, 2); }

CodebookSpec small_spec() {
  CodebookSpec s;
  s.x_range = {-6.0, 6.0};
  s.z_range = {10.0, 30.0};
  s.levels = {{2, 2}, {4, 4}};
  s.design_s_x = 16;
  s.design_s_z = 8;
  s.gain_db = 40.0;
  s.ipdd.bits = 2;
  s.ipdd.multistart = false;
  s.ao.max_outer_iters = 5;
  return s;
}

}  // namespace

TEST_SUITE("codebook") {

TEST_CASE("sampling grid midpoints") {
  const auto g = make_sampling_grid({0.0, 8.0}, {1.0, 2.0}, 4, 1, 1);
  REQUIRE(g.size() == 4);
  CHECK(g.points[0].x == doctest::Approx(1.0));
  CHECK(g.points[3].x == doctest::Approx(7.0));
  CHECK(g.points[2].z == doctest::Approx(1.5));
  const auto p = make_sampling_grid({-30.0, 30.0}, {15.0, 75.0}, 8, 4, 1);
  CHECK(p.size() == 32);
}

TEST_CASE("desired pattern amplitudes") {
  const auto grid = make_sampling_grid({0.0, 4.0}, {1.0, 3.0}, 4, 2, 1);
  const Region target{{0.0, 2.0}, {1.0, 2.0}};
  const auto p = desired_pattern(grid, target, db_to_amplitude(30.0));
  CHECK(p.amplitudes.sum() == doctest::Approx(2 * 31.622776601683793));
  CHECK(p.amplitudes.maxCoeff() == doctest::Approx(31.622776601683793));
  CHECK(p.phases.cwiseAbs().minCoeff() == doctest::Approx(1.0));
}

TEST_CASE("explicit B1/B2 identity and the factored design channels agree") {
  std::mt19937_64 rng(2);
  const auto geom = small_geom();
  const auto grid = make_sampling_grid({-3.0, 3.0}, {10.0, 20.0}, 3, 2, 1);
  const CVec w = test::random_cvec(rng, 2);
  const CVec phi = test::random_cvec(rng, 16);
  const auto tm = assemble_training_matrices(geom, grid, w);
  const Eigen::Index n = 16, s = 6, m = 2;
  const CMat a1 = unvec(tm.b1 * w, n, s);
  const CMat a2 = unvec(tm.b2.transpose() * phi.conjugate(), m, s).transpose();
  const CVec lhs = (phi.adjoint() * a1).transpose();
  const CVec rhs = a2 * w;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);

  const DesignChannels ch(geom, grid);
  CHECK((ch.a1(w) - a1).norm() < 1e-10);
  CHECK((ch.a2(phi) - a2).norm() < 1e-10);
  CHECK((ch.gram(w) - a1 * a1.adjoint()).norm() < 1e-9);
  CHECK((ch.response(w, phi) - lhs).norm() < 1e-10);
  CHECK((*tm.b - a1).norm() < 1e-12);
}

TEST_CASE("eigen precoder for a rank-one channel") {
  CVec a(3), b(2);
  a << 1.0, cplx(0, 1), 2.0;
  b << cplx(1, 1), 0.5;
  const CMat g = a * b.adjoint();
  const CVec w = eigen_precoder(g, 4.0);
  CHECK(w.squaredNorm() == doctest::Approx(4.0));
  CHECK(std::abs(w.dot(b)) / (w.norm() * b.norm()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("target phase update beats random unit-modulus alternatives") {
  std::mt19937_64 rng(7);
  const CVec e = test::random_cvec(rng, 12);
  const RVec amp = RVec::Constant(12, 2.0);
  const CVec best = update_pnu(e);
  const double f = (e - amp.cast<cplx>().cwiseProduct(best)).squaredNorm();
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int t = 0; t < 1000; ++t) {
    CVec alt(12);
    for (int i = 0; i < 12; ++i) alt(i) = std::polar(1.0, u(rng));
    CHECK(f <= (e - amp.cast<cplx>().cwiseProduct(alt)).squaredNorm() + 1e-12);
  }
}

TEST_CASE("socc then jocc: ordering, monotone trace, objective identity") {
  const auto geom = small_geom();
  const auto spec = small_spec();
  const auto grid = design_grid_for(spec, 1, {spec.x_range, spec.z_range});
  const DesignChannels ch(geom, grid);
  const Region target = level_region(spec, 1, 1);
  const auto pattern = desired_pattern(grid, target, db_to_amplitude(spec.gain_db));
  const auto socc = solve_socc(geom, ch, pattern, spec.ipdd, spec.ao);
  const auto jocc = solve_jocc(geom, ch, pattern, spec.ipdd, socc, spec.ao);
  CHECK(jocc.objective_trace.front() == doctest::Approx(socc.codeword.objective));
  CHECK(jocc.codeword.objective <= socc.codeword.objective + 1e-9 * socc.codeword.objective);
  for (std::size_t i = 1; i < jocc.step_trace.size(); ++i) CHECK(jocc.step_trace[i] <= jocc.step_trace[i - 1]);
  CHECK(jocc.codeword.bs_precoder.squaredNorm() <= geom.max_power_w * (1 + 1e-9));

  // Residual reconstructed from per-point gains and phases.
  CVec t = pattern.amplitudes.cast<cplx>().cwiseProduct(jocc.target_phases);
  const CVec r = ch.response(jocc.codeword.bs_precoder, jocc.codeword.ris_phases.values());
  const RVec gains = evaluate_beam_pattern(geom, jocc.codeword, grid);
  double f = 0.0;
  for (Eigen::Index s = 0; s < r.size(); ++s) {
    const cplx y = std::polar(std::pow(10.0, gains(s) / 20.0), std::arg(r(s)));
    f += std::norm(y - t(s));
  }
  CHECK(f == doctest::Approx(jocc.codeword.objective).epsilon(1e-9));
  CHECK(codebook_objective(ch, jocc.codeword.bs_precoder, jocc.codeword.ris_phases.values(), t) ==
        doctest::Approx(jocc.codeword.objective).epsilon(1e-9));
}

TEST_CASE("small two-level codebook and its JSON round trip") {
  const auto geom = small_geom();
  const auto spec = small_spec();
  const Codebook book = build_codebook(geom, spec);
  REQUIRE(book.levels.size() == 2);
  CHECK(book.levels[0].size() == 4);
  CHECK(book.levels[1].size() == 16);
  CHECK(book.children(2, 0).size() == 4);
  for (const auto* c : book.children(2, 3)) CHECK(book.levels[0][3].region.contains(c->region.x.mid(), c->region.z.mid()));

  const std::string text = codebook_to_json(book);
  const Codebook back = codebook_from_json(text, fingerprint(geom));
  CHECK(codebook_to_json(back) == text);
  CHECK(back.levels[1][5].ris_phases == book.levels[1][5].ris_phases);
  CHECK((back.levels[1][5].bs_precoder - book.levels[1][5].bs_precoder).norm() == 0.0);
  auto other = geom;
  other.n1 = 4;
  CHECK_THROWS_AS(codebook_from_json(text, fingerprint(other)), InvalidInput);
  CHECK_THROWS_AS(codebook_from_json("{\"format\": 3}"), InvalidInput);
}

TEST_CASE("spec validation") {
  auto s = small_spec();
  s.levels = {{2, 2}, {3, 4}};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = small_spec();
  s.z_range = {-1.0, 5.0};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

}
