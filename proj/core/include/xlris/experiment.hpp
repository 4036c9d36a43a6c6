// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner behind the command-line tool. Every subcommand writes its
// CSV/JSON artifacts into one output directory together with manifest.json,
// which records the resolved configuration, its hash, the seed, the library
// version and a hash of every artifact.

#pragma once

#include "xlris/config.hpp"
#include "xlris/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace xlris {

/// Library version string baked in at build time.
std::string library_version();

struct Artifact {
  std::string name;  // path relative to the output directory
  std::string hash;  // content_hash of the bytes written
};

struct RunReport {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<Artifact> artifacts;
  std::filesystem::path manifest;
};

/// Runs one of: "codebook build", "train", "im", "wmmse", "hybrid", "sweep".
/// Progress goes to `log` when given. Failures are rethrown with the stage name.
RunReport run_experiment(const std::string& subcommand, const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// Engine for one (seed, stream) pair; streams keep instances independent of
/// the order in which they run.
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream);

/// K users uniform in the rectangle, on the user plane.
std::vector<Point3> random_users(std::mt19937_64& rng, int users, Interval x_range, Interval z_range,
                                 double plane_y);

}  // namespace xlris
