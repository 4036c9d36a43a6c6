// SPDX-License-Identifier: Apache-2.0
//
// Multi-resolution codebook construction. A codeword pairs a BS precoder w with
// a discrete RIS configuration phi, designed so that the beam pattern
// |phi^H C(x, y_u, z) w| over a sampling grid matches a desired pattern: a
// constant amplitude C_g inside the codeword's target region and zero outside.
//
// Two constructions are provided:
//  * separate (SOCC): w is the principal eigen-direction of G^H G, then phi and
//    the free target phases are optimised with w fixed;
//  * joint (JOCC): alternating optimisation over w (power-constrained least
//    squares), phi (IPDD) and the free target phases (phase alignment).

#pragma once

#include "xlris/geometry.hpp"
#include "xlris/hybrid.hpp"
#include "xlris/projections.hpp"
#include "xlris/solvers.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace xlris {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Rectangle in the user plane (x along the array, z away from it).
struct Region {
  Interval x;
  Interval z;

  [[nodiscard]] bool contains(double px, double pz) const { return x.contains(px) && z.contains(pz); }
  bool operator==(const Region&) const = default;
};

struct GridPoint {
  double x = 0.0;
  double z = 0.0;
};

/// Midpoint-rule samples of a rectangle, x fastest.
struct SamplingGrid {
  int level = 1;
  Interval x_range;
  Interval z_range;
  int s_x = 1;
  int s_z = 1;
  double step_x = 0.0;
  double step_z = 0.0;
  std::vector<GridPoint> points;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  /// Cell (ix, iz) of the grid viewed as a tiling of its range.
  [[nodiscard]] Region cell(int ix, int iz) const;
};

SamplingGrid make_sampling_grid(Interval x_range, Interval z_range, int s_x, int s_z, int level);

struct DesiredPattern {
  RVec amplitudes;  // C_g inside the target region, 0 elsewhere
  CVec phases;      // unit modulus
  double gain = 0.0;
  Region target;

  /// p .* p_nu
  [[nodiscard]] CVec target_vector() const;
};

DesiredPattern desired_pattern(const SamplingGrid& grid, const Region& target, double gain,
                               std::optional<CVec> phases = std::nullopt);

/// Explicit training matrices for a grid:
///   B1 = [C_1; C_2; ...] ((N S) x M),  B2 = [C_1, C_2, ...] (N x (M S)),
///   B  = [C_1 w, C_2 w, ...] (N x S) when a precoder is supplied.
struct TrainingMatrices {
  CMat b1;
  CMat b2;
  std::optional<CMat> b;
};

TrainingMatrices assemble_training_matrices(const SystemGeometry& geom, const SamplingGrid& grid,
                                            const std::optional<CVec>& w = std::nullopt);

/// Factored view of the cascaded channels over a grid. Every C_s equals
/// diag(conj(h_s)) G, so the products needed by the solvers reduce to
/// element-wise scalings of G w and of the N x S matrix conj([h_1 ... h_S]).
class DesignChannels {
 public:
  DesignChannels(const SystemGeometry& geom, const SamplingGrid& grid);
  DesignChannels(CMat g, CMat user_channels);

  [[nodiscard]] Eigen::Index elements() const { return g_.rows(); }
  [[nodiscard]] Eigen::Index antennas() const { return g_.cols(); }
  [[nodiscard]] Eigen::Index samples() const { return hc_.cols(); }
  [[nodiscard]] const CMat& g() const { return g_; }

  /// A1(w) = unvec_{N,S}(B1 w); column s is C_s w.
  [[nodiscard]] CMat a1(const CVec& w) const;
  /// A2(phi) = (unvec_{M,S}(B2^T conj(phi)))^T; row s is phi^H C_s.
  [[nodiscard]] CMat a2(const CVec& phi) const;
  /// phi^H A1(w) as a length-S vector.
  [[nodiscard]] CVec response(const CVec& w, const CVec& phi) const;
  /// A1(w) A1(w)^H
  [[nodiscard]] CMat gram(const CVec& w) const;
  /// A1(w) conj(t)
  [[nodiscard]] CVec correlate(const CVec& w, const CVec& t) const;

 private:
  const CMat& correlation() const;

  CMat g_;
  CMat hc_;  // N x S, column s = conj(h_s)
  mutable std::optional<CMat> r_;  // hc hc^H, computed on first use
};

struct Codeword {
  CVec bs_precoder;
  DiscretePhaseVector ris_phases;
  int level = 1;
  int region_index = 0;
  int parent_index = -1;
  Region region;
  double objective = 0.0;
  std::optional<HybridPrecoder> hybrid;  // analog/digital factorisation of bs_precoder
};

struct AoConfig {
  int max_outer_iters = 50;
  double rel_tol = 1e-6;
};

/// A designed codeword with the free target phases and the convergence record.
struct CodewordDesign {
  Codeword codeword;
  CVec target_phases;
  std::vector<double> objective_trace;  // after each outer iteration, [0] = initial
  std::vector<double> step_trace;       // after every sub-step, [0] = initial
  int outer_iterations = 0;
  double consensus_gap = 0.0;           // of the last accepted IPDD call
  bool ipdd_converged = true;
};

/// || phi^H A1(w) - (p .* p_nu)^T ||^2
double codebook_objective(const DesignChannels& ch, const CVec& w, const CVec& phi, const CVec& target);

/// Closed-form target-phase update: phase alignment of A1^T conj(phi).
CVec update_pnu(const CVec& a1t_phi);

/// sqrt(p_max) times the principal eigenvector of G^H G.
CVec eigen_precoder(const CMat& g, double p_max);

CodewordDesign solve_socc(const SystemGeometry& geom, const DesignChannels& ch, const DesiredPattern& pattern,
                          const IpddConfig& ipdd, const AoConfig& ao = {});

/// Alternating optimisation from `init` (typically a SOCC design). Sub-steps that
/// would increase the objective are rejected, so the trace is non-increasing.
CodewordDesign solve_jocc(const SystemGeometry& geom, const DesignChannels& ch, const DesiredPattern& pattern,
                          const IpddConfig& ipdd, const CodewordDesign& init, const AoConfig& ao = {});

/// 20 log10 |phi^H C(x, y_u, z) w| per grid point, floored at -200 dB.
RVec evaluate_beam_pattern(const SystemGeometry& geom, const Codeword& codeword, const SamplingGrid& eval_grid);

inline constexpr double kGainFloorDb = -200.0;

/// Mean gain (dB) over grid points inside the codeword's region minus the mean
/// over points outside it. +inf when the grid has no outside points.
double region_separation_db(const SystemGeometry& geom, const Codeword& codeword, const SamplingGrid& grid);

enum class CodebookMethod { jocc, socc };

/// Cumulative number of regions along x and z at one level.
struct LevelSpec {
  int s_x = 1;
  int s_z = 1;
};

struct CodebookSpec {
  Interval x_range;
  Interval z_range;
  std::vector<LevelSpec> levels;
  int design_s_x = 1;  // sampling density over the full range
  int design_s_z = 1;
  double gain_db = 30.0;
  CodebookMethod method = CodebookMethod::jocc;
  IpddConfig ipdd;
  AoConfig ao;

  void validate() const;
};

struct Codebook {
  std::vector<std::vector<Codeword>> levels;
  std::uint64_t geometry_fingerprint = 0;
  int bits = 2;

  /// Codewords of `level` (1-based) whose parent is `parent` (-1 for level 1).
  [[nodiscard]] std::vector<const Codeword*> children(int level, int parent) const;
};

/// Design grid used for the children of one parent region at `level`.
SamplingGrid design_grid_for(const CodebookSpec& spec, int level, const Region& parent);

/// Region of cell `index` (x fastest) at `level`.
Region level_region(const CodebookSpec& spec, int level, int index);

using BuildProgress = std::function<void(int level, int done, int total)>;

Codebook build_codebook(const SystemGeometry& geom, const CodebookSpec& spec, const BuildProgress& progress = {});

}  // namespace xlris
