// SPDX-License-Identifier: Apache-2.0
#include "xlris/config.hpp"
#include "xlris/csv.hpp"
#include "xlris/experiment.hpp"

#include <doctest.h>

#include <filesystem>

using namespace xlris;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xlris_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

// Smallest config that exercises every subcommand in a fraction of a second.
std::string tiny_config() {
  return merge_json(profile_json(Profile::desk), R"({
    "geometry": {"n1": 6, "n2": 2, "m_antennas": 2},
    "codebook": {"levels": [[2, 1], [4, 2]], "design_grid": [8, 4], "ao": {"max_outer_iters": 3}},
    "training": {"placements": 3},
    "im": {"users": 2, "m_antennas": 2, "bits": 2, "instances": 1, "adapt_rounds": 1, "inner_rounds": 2, "probe_rounds": 1},
    "benchmark": {"wmmse_iters": 3},
    "hybrid": {"m_antennas": 4, "rf_chains": 2, "rounds": 2},
    "sweep": {"parameter": "bits", "values": [1, 2], "instances": 1, "workers": 2}
  })");
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("format and refusal of empty traces") {
  CsvTable t;
  t.header = {"iter", "J", "name"};
  t.add({std::int64_t{3}, 0.1234567890123456, std::string("a")});
  t.add({std::int64_t{4}, 1.0 / 3.0, std::string("b")});
  CHECK(to_csv_string(t) == "iter,J,name\n3,0.123456789012,a\n4,0.333333333333,b\n");
  CHECK_THROWS_AS(t.add({std::int64_t{1}}), InvalidInput);
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  export_csv(t, dir / "x.csv");
  CHECK(read_file(dir / "x.csv") == to_csv_string(t));
  CsvTable empty;
  empty.header = {"a"};
  CHECK_THROWS_AS(export_csv(empty, dir / "y.csv"), InvalidInput);
  CHECK(!fs::exists(dir / "y.csv"));
  CHECK(content_hash("") == "cbf29ce484222325");
}

}

TEST_SUITE("config") {

TEST_CASE("profiles parse, dBm converts to watts") {
  const auto desk = parse_config(profile_json(Profile::desk));
  REQUIRE(desk.geometry);
  CHECK(desk.geometry->n1 == 32);
  CHECK(desk.geometry->elements() == 128);
  CHECK(desk.geometry->max_power_w == doctest::Approx(10.0));
  CHECK(desk.geometry->noise_power_w == doctest::Approx(1e-14));
  CHECK(desk.codebook->x_range.lo == doctest::Approx(-30.0));
  CHECK(desk.codebook->levels.size() == 2);
  const auto paper = parse_config(profile_json(Profile::paper));
  CHECK(paper.geometry->elements() == 512);
  CHECK(paper.codebook->gain_db == 30.0);
}

TEST_CASE("errors name the offending field") {
  CHECK(message_of("{\"geometry\": {\"n1\": 4}}").find("geometry.wavelength_m") != std::string::npos);
  CHECK(message_of("{\"bogus\": 1}").find("bogus") != std::string::npos);
  CHECK(message_of(merge_json(profile_json(Profile::desk), "{\"im\": {\"users\": 0}}")).find("im.users") !=
        std::string::npos);
  CHECK(message_of(merge_json(profile_json(Profile::desk), "{\"codebook\": {\"method\": \"x\"}}"))
            .find("codebook.method") != std::string::npos);
  CHECK(message_of("{not json").find("JSON") != std::string::npos);

  const auto cfg = parse_config("{\"seed\": 3}");
  try {
    require_blocks(cfg, "codebook build");
    FAIL("expected an error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("\"geometry\"") != std::string::npos);
  }
  auto no_seed = parse_config(merge_json(profile_json(Profile::desk), "{\"seed\": null}"));
  CHECK_THROWS_AS(require_blocks(no_seed, "im"), InvalidInput);
  CHECK_NOTHROW(require_blocks(no_seed, "codebook build"));
}

}

TEST_SUITE("experiment") {

TEST_CASE("every subcommand writes artifacts; reruns are byte-identical; manifests reproduce") {
  const auto cfg = parse_config(tiny_config());
  for (const std::string sub : {"codebook build", "train", "im", "wmmse", "hybrid", "sweep"}) {
    CAPTURE(sub);
    const fs::path a = scratch("run_a"), b = scratch("run_b"), c = scratch("run_c");
    const auto ra = run_experiment(sub, cfg, a);
    const auto rb = run_experiment(sub, cfg, b);
    REQUIRE(!ra.artifacts.empty());
    REQUIRE(ra.artifacts.size() == rb.artifacts.size());
    for (std::size_t i = 0; i < ra.artifacts.size(); ++i) {
      CHECK(ra.artifacts[i].name == rb.artifacts[i].name);
      CHECK(ra.artifacts[i].hash == rb.artifacts[i].hash);
      CHECK(read_file(a / ra.artifacts[i].name) == read_file(b / rb.artifacts[i].name));
    }
    const auto again = parse_config(read_file(ra.manifest));
    const auto rc = run_experiment(sub, again, c);
    CHECK(rc.config_hash == ra.config_hash);
    CHECK(read_file(rc.manifest) == read_file(ra.manifest));
  }
}

TEST_CASE("trace schemas") {
  const auto cfg = parse_config(tiny_config());
  const fs::path dir = scratch("schema");
  run_experiment("im", cfg, dir);
  CHECK(read_file(dir / "im_trace.csv").rfind("instance,iter,alpha,beta,gamma1,gamma2,gamma3,J,sum_rate,rate_1,rate_2\n", 0) == 0);
  run_experiment("wmmse", cfg, dir);
  CHECK(read_file(dir / "wmmse_trace.csv").rfind("instance,iteration,sum_rate,rate_1,rate_2,J\n", 0) == 0);
  run_experiment("train", cfg, dir);
  CHECK(read_file(dir / "train_probes.csv").rfind("placement,scheme,level,region_index,snr_db\n", 0) == 0);
  run_experiment("codebook build", cfg, dir);
  CHECK(read_file(dir / "beam_pattern.csv").rfind("level,region_index,x_m,z_m,gain_db\n", 0) == 0);
}

TEST_CASE("seeded helpers are reproducible") {
  auto a = seeded_engine(5, 2), b = seeded_engine(5, 2), c = seeded_engine(5, 3);
  CHECK(a() == b());
  CHECK(a() != c());
  auto r = seeded_engine(1, 1);
  const auto users = random_users(r, 50, {-1.0, 1.0}, {2.0, 3.0}, 0.5);
  for (const auto& u : users) {
    CHECK(u.x >= -1.0);
    CHECK(u.x < 1.0);
    CHECK(u.z >= 2.0);
    CHECK(u.y == 0.5);
  }
}

}
