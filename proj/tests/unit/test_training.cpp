// SPDX-License-Identifier: Apache-2.0
#include "xlris/beam_training.hpp"
#include "xlris/experiment.hpp"

#include <doctest.h>

using namespace xlris;

TEST_SUITE("beam_training") {

TEST_CASE("training overhead") {
  CHECK(training_overhead(3, 3, TrainingScheme::hierarchical) == 9);
  CHECK(training_overhead(3, 3, TrainingScheme::exhaustive) == 27);
  CHECK(training_overhead(4, 6, TrainingScheme::hierarchical) == 24);
  CHECK(training_overhead(4, 6, TrainingScheme::exhaustive) == 4096);
  for (int s : {1, 5, 32}) {
    CHECK(training_overhead(s, 1, TrainingScheme::hierarchical) == s);
    CHECK(training_overhead(s, 1, TrainingScheme::exhaustive) == s);
  }
  CHECK_THROWS_AS(training_overhead(0, 2, TrainingScheme::hierarchical), InvalidInput);
  CHECK_THROWS(training_overhead(1024, 20, TrainingScheme::exhaustive));
}

TEST_CASE("training on a small codebook") {
  const auto geom = SystemGeometry::half_wavelength(0.03, 8, 2, 2);
  CodebookSpec spec;
  spec.x_range = {-6.0, 6.0};
  spec.z_range = {10.0, 30.0};
  spec.levels = {{2, 1}, {4, 1}};
  spec.design_s_x = 32;
  spec.design_s_z = 4;
  spec.gain_db = 40.0;
  spec.ipdd.multistart = false;
  spec.ao.max_outer_iters = 5;
  const Codebook book = build_codebook(geom, spec);

  auto rng = seeded_engine(1, 0);
  const auto users = random_users(rng, 10, spec.x_range, spec.z_range, 0.0);
  for (const auto& u : users) {
    const auto h = hierarchical_train(book, geom, u, geom.noise_power_w);
    const auto e = exhaustive_train(book, geom, u, geom.noise_power_w);
    CHECK(h.probes_used == 4);
    CHECK(e.probes_used == 4);
    CHECK(h.selected_path.size() == 2);
    CHECK(e.leaf_snr >= h.leaf_snr);
    CHECK(h.achieved_rate == doctest::Approx(std::log2(1.0 + h.leaf_snr)));
    const auto h2 = hierarchical_train(book, geom, u, geom.noise_power_w);
    CHECK(h2.selected_path == h.selected_path);
    const auto& leaf = book.levels[1][h.selected_path.back()];
    CHECK(h.estimated_user.x == doctest::Approx(leaf.region.x.mid()));
  }

  // A codeword serves its own region better than a far-away point.
  const Codeword& cw = book.levels[1][0];
  const double in = probe_snr(geom, cw, {cw.region.x.mid(), 0.0, cw.region.z.mid()}, 1.0);
  const double out = probe_snr(geom, book.levels[1][0], {book.levels[1][3].region.x.mid(), 0.0, 20.0}, 1.0);
  CHECK(in > out);

  std::mt19937_64 noise(3);
  CHECK_THROWS_AS(hierarchical_train(book, geom, users[0], 1.0, NoiseMode::noisy, nullptr), InvalidInput);
  const auto noisy = hierarchical_train(book, geom, users[0], 1e-6, NoiseMode::noisy, &noise);
  CHECK(noisy.probes.size() == 4);
}

}
