// SPDX-License-Identifier: Apache-2.0
//
// Beam training with SNR feedback over a multi-level codebook: hierarchical
// descent (probe the children of the current region, keep the best) and the
// exhaustive leaf sweep it is compared against.

#pragma once

#include "xlris/codebook.hpp"
#include "xlris/geometry.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace xlris {

enum class TrainingScheme { hierarchical, exhaustive };
enum class NoiseMode { deterministic, noisy };

struct ProbeRecord {
  int level = 0;
  int region_index = 0;
  double snr = 0.0;  // linear
};

struct TrainingResult {
  std::vector<int> selected_path;  // region index per level
  GridPoint estimated_user;        // centre of the winning leaf region
  int probes_used = 0;
  std::vector<ProbeRecord> probes;
  double leaf_snr = 0.0;           // deterministic SNR of the winning leaf
  double achieved_rate = 0.0;      // log2(1 + leaf_snr)
};

/// |phi^H C w|^2 / sigma2 on a user's cascaded channel C. With `rng`, one
/// CN(0, sigma2) sample is added to the received symbol before the magnitude.
double probe_snr(const CMat& cascaded, const Codeword& codeword, double noise_power, std::mt19937_64* rng = nullptr);

double probe_snr(const SystemGeometry& geom, const Codeword& codeword, const Point3& user, double noise_power,
                 std::mt19937_64* rng = nullptr);

/// Argmax feedback per level; ties resolve to the lowest region index. `rng` is
/// required in noisy mode.
TrainingResult hierarchical_train(const Codebook& codebook, const SystemGeometry& geom, const Point3& user,
                                  double noise_power, NoiseMode mode = NoiseMode::deterministic,
                                  std::mt19937_64* rng = nullptr);

/// Probes every codeword of the deepest level once.
TrainingResult exhaustive_train(const Codebook& codebook, const SystemGeometry& geom, const Point3& user,
                                double noise_power, NoiseMode mode = NoiseMode::deterministic,
                                std::mt19937_64* rng = nullptr);

/// S * L probes for the hierarchical scheme, S^L for the exhaustive one.
std::int64_t training_overhead(int s, int l, TrainingScheme scheme);

}  // namespace xlris
