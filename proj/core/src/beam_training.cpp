// SPDX-License-Identifier: Apache-2.0

#include "xlris/beam_training.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace xlris {

namespace {

void require_rng(NoiseMode mode, const std::mt19937_64* rng) {
  if (mode == NoiseMode::noisy && rng == nullptr) throw InvalidInput("training: noisy mode needs a seeded generator");
}

void finish(TrainingResult& r, const Codeword& leaf, const CMat& cascaded, double noise_power) {
  r.estimated_user = {leaf.region.x.mid(), leaf.region.z.mid()};
  r.leaf_snr = probe_snr(cascaded, leaf, noise_power);
  r.achieved_rate = std::log2(1.0 + r.leaf_snr);
}

}  // namespace

double probe_snr(const CMat& cascaded, const Codeword& codeword, double noise_power, std::mt19937_64* rng) {
  if (!(noise_power > 0.0)) throw InvalidInput("probe_snr: noise power must be positive");
  if (cascaded.cols() != codeword.bs_precoder.size() ||
      cascaded.rows() != static_cast<Eigen::Index>(codeword.ris_phases.size())) {
    throw InvalidInput("probe_snr: codeword does not match the channel dimensions");
  }
  cplx y = codeword.ris_phases.values().dot(cascaded * codeword.bs_precoder);
  if (rng != nullptr) {
    std::normal_distribution<double> n(0.0, std::sqrt(noise_power / 2.0));
    const double re = n(*rng);
    const double im = n(*rng);
    y += cplx(re, im);
  }
  return std::norm(y) / noise_power;
}

double probe_snr(const SystemGeometry& geom, const Codeword& codeword, const Point3& user, double noise_power,
                 std::mt19937_64* rng) {
  return probe_snr(cascaded_channel(bs_ris_channel(geom), ris_user_channel(geom, user)), codeword, noise_power, rng);
}

TrainingResult hierarchical_train(const Codebook& codebook, const SystemGeometry& geom, const Point3& user,
                                  double noise_power, NoiseMode mode, std::mt19937_64* rng) {
  if (codebook.levels.empty() || codebook.levels.front().empty()) throw InvalidInput("hierarchical_train: empty codebook");
  require_rng(mode, rng);
  std::mt19937_64* noise = mode == NoiseMode::noisy ? rng : nullptr;
  const CMat cascaded = cascaded_channel(bs_ris_channel(geom), ris_user_channel(geom, user));

  TrainingResult r;
  int parent = -1;
  const Codeword* winner = nullptr;
  for (int level = 1; level <= static_cast<int>(codebook.levels.size()); ++level) {
    const auto children = codebook.children(level, parent);
    if (children.empty()) {
      throw InvalidInput("hierarchical_train: region " + std::to_string(parent) + " has no children at level " +
                         std::to_string(level));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const Codeword* cw : children) {
      const double snr = probe_snr(cascaded, *cw, noise_power, noise);
      r.probes.push_back({level, cw->region_index, snr});
      if (snr > best || (snr == best && cw->region_index < winner->region_index)) {
        best = snr;
        winner = cw;
      }
    }
    r.probes_used += static_cast<int>(children.size());
    r.selected_path.push_back(winner->region_index);
    parent = winner->region_index;
  }
  finish(r, *winner, cascaded, noise_power);
  return r;
}

TrainingResult exhaustive_train(const Codebook& codebook, const SystemGeometry& geom, const Point3& user,
                                double noise_power, NoiseMode mode, std::mt19937_64* rng) {
  if (codebook.levels.empty() || codebook.levels.back().empty()) throw InvalidInput("exhaustive_train: empty codebook");
  require_rng(mode, rng);
  std::mt19937_64* noise = mode == NoiseMode::noisy ? rng : nullptr;
  const CMat cascaded = cascaded_channel(bs_ris_channel(geom), ris_user_channel(geom, user));
  const int leaf_level = static_cast<int>(codebook.levels.size());

  TrainingResult r;
  const Codeword* winner = nullptr;
  double best = -std::numeric_limits<double>::infinity();
  for (const Codeword& cw : codebook.levels.back()) {
    const double snr = probe_snr(cascaded, cw, noise_power, noise);
    r.probes.push_back({leaf_level, cw.region_index, snr});
    if (snr > best) {  // leaves are stored by region index, so the first maximum wins ties
      best = snr;
      winner = &cw;
    }
  }
  r.probes_used = static_cast<int>(codebook.levels.back().size());
  r.selected_path.push_back(winner->region_index);
  finish(r, *winner, cascaded, noise_power);
  return r;
}

std::int64_t training_overhead(int s, int l, TrainingScheme scheme) {
  if (s < 1 || l < 1) throw InvalidInput("training_overhead: S and L must be >= 1");
  if (scheme == TrainingScheme::hierarchical) return static_cast<std::int64_t>(s) * l;
  std::int64_t total = 1;
  for (int i = 0; i < l; ++i) {
    if (total > std::numeric_limits<std::int64_t>::max() / s) throw InvalidInput("training_overhead: S^L overflows");
    total *= s;
  }
  return total;
}

}  // namespace xlris
