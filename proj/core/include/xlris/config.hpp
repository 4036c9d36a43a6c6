// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration. The file format is JSON with named blocks
// (geometry, codebook, training, im, benchmark, hybrid, sweep). Powers may be
// given in dBm and are converted to watts here and nowhere else.

#pragma once

#include "xlris/codebook.hpp"
#include "xlris/geometry.hpp"
#include "xlris/multiuser_im.hpp"
#include "xlris/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xlris {

enum class Profile { desk, paper };

struct TrainingBlock {
  int placements = 100;
  std::optional<double> snr_db;  // unset: noiseless probes
  Interval x_range;              // user placement ranges
  Interval z_range;
  bool exhaustive = true;        // also run the exhaustive sweep
};

struct ImBlock {
  int users = 3;
  int m_antennas = 8;
  int bits = 3;
  int instances = 10;
  Interval x_range;
  Interval z_range;
  PhaseMethod phase_method = PhaseMethod::ipdd;
  int adapt_rounds = 10;
  int inner_rounds = 20;
  int probe_rounds = 5;
  double step = 0.1;
  double perturb = 1e-2;
  std::optional<std::vector<double>> chi_init;  // alpha, beta, gamma1..3
};

struct BenchmarkBlock {
  int wmmse_iters = 50;
};

struct HybridBlock {
  int m_antennas = 16;
  int rf_chains = 4;
  int bits = 2;
  int rounds = 20;
};

struct SweepBlock {
  std::string parameter;  // n1 | m_antennas | bits | max_power_dbm
  std::vector<double> values;
  int instances = 3;
  int workers = 0;        // 0: hardware concurrency
};

struct ExperimentConfig {
  std::optional<SystemGeometry> geometry;
  std::optional<CodebookSpec> codebook;
  std::optional<std::string> codebook_path;  // reuse a saved codebook in `train`
  std::optional<TrainingBlock> training;
  std::optional<ImBlock> im;
  std::optional<BenchmarkBlock> benchmark;
  std::optional<HybridBlock> hybrid;
  std::optional<SweepBlock> sweep;
  std::optional<std::uint64_t> seed;
  IpddConfig ipdd;              // shared solver settings ("ipdd" block)
  std::string canonical_json;   // resolved configuration, stable key order
};

/// Preset configuration text for a profile.
std::string profile_json(Profile p);

/// RFC 7386 merge of `patch` onto `base`; both JSON text.
std::string merge_json(const std::string& base, const std::string& patch);

/// If `text` is a run manifest, returns its embedded configuration; otherwise `text`.
std::string unwrap_manifest(const std::string& text);

/// Parses and validates every block that is present. Errors name the field.
ExperimentConfig parse_config(const std::string& text);

/// Blocks required by a subcommand: "codebook build", "train", "im", "wmmse", "hybrid", "sweep".
void require_blocks(const ExperimentConfig& cfg, const std::string& subcommand);

}  // namespace xlris
