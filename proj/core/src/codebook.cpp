// SPDX-License-Identifier: Apache-2.0

#include "xlris/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace xlris {

Region SamplingGrid::cell(int ix, int iz) const {
  const double wx = x_range.width() / s_x;
  const double wz = z_range.width() / s_z;
  return {{x_range.lo + ix * wx, x_range.lo + (ix + 1) * wx}, {z_range.lo + iz * wz, z_range.lo + (iz + 1) * wz}};
}

SamplingGrid make_sampling_grid(Interval x_range, Interval z_range, int s_x, int s_z, int level) {
  if (!(x_range.hi > x_range.lo) || !(z_range.hi > z_range.lo)) {
    throw InvalidInput("sampling grid: empty x or z range");
  }
  if (s_x < 1 || s_z < 1) throw InvalidInput("sampling grid: sample counts must be >= 1");
  SamplingGrid g;
  g.level = level;
  g.x_range = x_range;
  g.z_range = z_range;
  g.s_x = s_x;
  g.s_z = s_z;
  g.step_x = x_range.width() / s_x;
  g.step_z = z_range.width() / s_z;
  g.points.reserve(static_cast<std::size_t>(s_x) * s_z);
  for (int iz = 1; iz <= s_z; ++iz) {
    const double z = z_range.lo + (iz - 0.5) * z_range.width() / s_z;
    for (int ix = 1; ix <= s_x; ++ix) {
      g.points.push_back({x_range.lo + (ix - 0.5) * x_range.width() / s_x, z});
    }
  }
  return g;
}

CVec DesiredPattern::target_vector() const { return amplitudes.cast<cplx>().cwiseProduct(phases); }

DesiredPattern desired_pattern(const SamplingGrid& grid, const Region& target, double gain,
                               std::optional<CVec> phases) {
  if (!(gain > 0.0)) throw InvalidInput("desired pattern: gain must be positive");
  const double tol = 1e-9 * std::max(grid.x_range.width(), grid.z_range.width());
  if (target.x.lo < grid.x_range.lo - tol || target.x.hi > grid.x_range.hi + tol ||
      target.z.lo < grid.z_range.lo - tol || target.z.hi > grid.z_range.hi + tol ||
      target.x.hi < target.x.lo || target.z.hi < target.z.lo) {
    throw InvalidInput("desired pattern: target region lies outside the sampling grid");
  }
  const auto s = static_cast<Eigen::Index>(grid.size());
  DesiredPattern p;
  p.gain = gain;
  p.target = target;
  p.amplitudes = RVec::Zero(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto& pt = grid.points[static_cast<std::size_t>(i)];
    if (target.contains(pt.x, pt.z)) p.amplitudes(i) = gain;
  }
  if (phases) {
    if (phases->size() != s) throw InvalidInput("desired pattern: phase vector length mismatch");
    p.phases = phase_align(*phases);
  } else {
    p.phases = CVec::Ones(s);
  }
  return p;
}

namespace {

CMat grid_user_channels(const SystemGeometry& geom, const SamplingGrid& grid) {
  CMat h(static_cast<Eigen::Index>(geom.elements()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto& pt = grid.points[s];
    if (!(pt.z > 0.0)) throw InvalidInput("grid point with z <= 0 is outside the near-field region");
    h.col(static_cast<Eigen::Index>(s)) = ris_user_channel(geom, {pt.x, geom.user_plane_y_m, pt.z});
  }
  return h;
}

}  // namespace

TrainingMatrices assemble_training_matrices(const SystemGeometry& geom, const SamplingGrid& grid,
                                            const std::optional<CVec>& w) {
  const CMat g = bs_ris_channel(geom);
  const CMat h = grid_user_channels(geom, grid);
  const Eigen::Index n = g.rows();
  const Eigen::Index m = g.cols();
  const auto s = static_cast<Eigen::Index>(grid.size());
  if (w && w->size() != m) throw InvalidInput("training matrices: precoder length differs from antenna count");

  TrainingMatrices out;
  out.b1.resize(n * s, m);
  out.b2.resize(n, m * s);
  if (w) out.b = CMat(n, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const CMat c = cascaded_channel(g, h.col(i));
    out.b1.block(i * n, 0, n, m) = c;
    out.b2.block(0, i * m, n, m) = c;
    if (w) out.b->col(i) = c * *w;
  }
  return out;
}

DesignChannels::DesignChannels(const SystemGeometry& geom, const SamplingGrid& grid)
    : g_(bs_ris_channel(geom)), hc_(grid_user_channels(geom, grid).conjugate()) {}

DesignChannels::DesignChannels(CMat g, CMat user_channels) : g_(std::move(g)), hc_(user_channels.conjugate()) {
  if (g_.rows() != hc_.rows()) throw InvalidInput("DesignChannels: G and user channels disagree on N");
}

CMat DesignChannels::a1(const CVec& w) const {
  const CVec gw = g_ * w;
  return gw.asDiagonal() * hc_;
}

CMat DesignChannels::a2(const CVec& phi) const {
  return hc_.transpose() * (phi.conjugate().asDiagonal() * g_);
}

CVec DesignChannels::response(const CVec& w, const CVec& phi) const {
  const CVec gw = g_ * w;
  return hc_.transpose() * phi.conjugate().cwiseProduct(gw);
}

const CMat& DesignChannels::correlation() const {
  if (!r_) r_ = hermitian_part(hc_ * hc_.adjoint());
  return *r_;
}

CMat DesignChannels::gram(const CVec& w) const {
  const CVec gw = g_ * w;
  return hermitian_part((gw * gw.adjoint()).cwiseProduct(correlation()));
}

CVec DesignChannels::correlate(const CVec& w, const CVec& t) const {
  const CVec gw = g_ * w;
  return gw.cwiseProduct(hc_ * t.conjugate());
}

double codebook_objective(const DesignChannels& ch, const CVec& w, const CVec& phi, const CVec& target) {
  return (ch.response(w, phi) - target).squaredNorm();
}

CVec update_pnu(const CVec& a1t_phi) { return phase_align(a1t_phi); }

CVec eigen_precoder(const CMat& g, double p_max) {
  if (!(p_max > 0.0)) throw InvalidInput("eigen_precoder: power budget must be positive");
  const auto ep = principal_eigenpair(hermitian_part(g.adjoint() * g));
  return std::sqrt(p_max) * ep.vector;
}

namespace {

QuadraticForm phase_problem(const DesignChannels& ch, const CVec& w, const CVec& target) {
  QuadraticForm q;
  q.hessian = ch.gram(w);
  q.linear = ch.correlate(w, target);
  q.constant = target.squaredNorm();
  return q;
}

struct AoState {
  CVec w;
  DiscretePhaseVector phi;
  CVec pnu;
  double f = 0.0;
};

// One IPDD phi-step followed by the target-phase update; shared by both methods.
void phase_and_pnu_steps(const DesignChannels& ch, const DesiredPattern& pattern, const IpddConfig& ipdd,
                         AoState& st, CodewordDesign& out) {
  const CVec target = pattern.amplitudes.cast<cplx>().cwiseProduct(st.pnu);
  const auto res = ipdd_quadratic_discrete(phase_problem(ch, st.w, target), ipdd, st.phi);
  const double f_phi = codebook_objective(ch, st.w, res.phases.values(), target);
  if (f_phi <= st.f) {
    st.phi = res.phases;
    st.f = f_phi;
    out.consensus_gap = res.consensus_gap;
    out.ipdd_converged = res.converged;
  }
  out.step_trace.push_back(st.f);

  const CVec resp = ch.response(st.w, st.phi.values());
  const CVec pnu = update_pnu(resp);
  const double f_p = (resp - pattern.amplitudes.cast<cplx>().cwiseProduct(pnu)).squaredNorm();
  if (f_p <= st.f) {
    st.pnu = pnu;
    st.f = f_p;
  }
  out.step_trace.push_back(st.f);
}

bool stalled(double before, double after, double rel_tol) {
  return (before - after) <= rel_tol * std::max(std::abs(before), 1e-300);
}

CodewordDesign finish(const DesiredPattern& pattern, const AoState& st, CodewordDesign out) {
  out.codeword.bs_precoder = st.w;
  out.codeword.ris_phases = st.phi;
  out.codeword.region = pattern.target;
  out.codeword.objective = st.f;
  out.target_phases = st.pnu;
  return out;
}

}  // namespace

CodewordDesign solve_socc(const SystemGeometry& geom, const DesignChannels& ch, const DesiredPattern& pattern,
                          const IpddConfig& ipdd, const AoConfig& ao) {
  if (ch.samples() != pattern.amplitudes.size()) throw InvalidInput("solve_socc: pattern/grid size mismatch");
  AoState st;
  st.w = eigen_precoder(ch.g(), geom.max_power_w);
  // Start from the discrete configuration focusing on the centre of the target region.
  const CVec h_c = ris_user_channel(geom, {pattern.target.x.mid(), geom.user_plane_y_m, pattern.target.z.mid()});
  if (h_c.size() != ch.elements()) throw InvalidInput("solve_socc: geometry does not match the channels");
  st.phi = cmdpp_project(CVec(h_c.conjugate().cwiseProduct(ch.g() * st.w)), ipdd.bits);
  st.pnu = pattern.phases;
  st.f = codebook_objective(ch, st.w, st.phi.values(), pattern.target_vector());

  CodewordDesign out;
  out.objective_trace.push_back(st.f);
  out.step_trace.push_back(st.f);

  // Align the target phases to the initial response first, so the first phi-step
  // fits a target the channel can actually produce.
  const CVec resp = ch.response(st.w, st.phi.values());
  const CVec pnu = update_pnu(resp);
  const double f_p = (resp - pattern.amplitudes.cast<cplx>().cwiseProduct(pnu)).squaredNorm();
  if (f_p <= st.f) {
    st.pnu = pnu;
    st.f = f_p;
  }
  out.step_trace.push_back(st.f);

  for (int it = 0; it < ao.max_outer_iters; ++it) {
    const double before = st.f;
    phase_and_pnu_steps(ch, pattern, ipdd, st, out);
    out.objective_trace.push_back(st.f);
    out.outer_iterations = it + 1;
    if (stalled(before, st.f, ao.rel_tol)) break;
  }
  return finish(pattern, st, std::move(out));
}

CodewordDesign solve_jocc(const SystemGeometry& geom, const DesignChannels& ch, const DesiredPattern& pattern,
                          const IpddConfig& ipdd, const CodewordDesign& init, const AoConfig& ao) {
  if (ch.samples() != pattern.amplitudes.size()) throw InvalidInput("solve_jocc: pattern/grid size mismatch");
  const auto& cw = init.codeword;
  if (cw.bs_precoder.size() != ch.antennas() || static_cast<Eigen::Index>(cw.ris_phases.size()) != ch.elements()) {
    throw InvalidInput("solve_jocc: initial codeword does not match the channel dimensions");
  }
  if (cw.bs_precoder.squaredNorm() > geom.max_power_w * (1.0 + 1e-9)) {
    throw InvalidInput("solve_jocc: initial precoder violates the power budget");
  }
  if (cw.ris_phases.bits() != ipdd.bits) throw InvalidInput("solve_jocc: initial phases use a different resolution");

  AoState st;
  st.w = cw.bs_precoder;
  st.phi = cw.ris_phases;
  st.pnu = init.target_phases.size() == pattern.phases.size() ? init.target_phases : pattern.phases;
  st.f = codebook_objective(ch, st.w, st.phi.values(), pattern.amplitudes.cast<cplx>().cwiseProduct(st.pnu));

  CodewordDesign out;
  out.codeword = cw;
  out.objective_trace.push_back(st.f);
  out.step_trace.push_back(st.f);
  for (int it = 0; it < ao.max_outer_iters; ++it) {
    const double before = st.f;

    // (a) precoder: power-constrained least squares on A2(phi) w ~ p .* p_nu.
    const CVec target = pattern.amplitudes.cast<cplx>().cwiseProduct(st.pnu);
    const CVec phi = st.phi.values();
    const CVec w = power_constrained_ls(ch.a2(phi), target, geom.max_power_w).w;
    const double f_w = codebook_objective(ch, w, phi, target);
    if (f_w <= st.f) {
      st.w = w;
      st.f = f_w;
    }
    out.step_trace.push_back(st.f);

    // (b) RIS phases by IPDD, (c) target phases by phase alignment.
    phase_and_pnu_steps(ch, pattern, ipdd, st, out);

    out.objective_trace.push_back(st.f);
    out.outer_iterations = it + 1;
    if (stalled(before, st.f, ao.rel_tol)) break;
  }
  return finish(pattern, st, std::move(out));
}

RVec evaluate_beam_pattern(const SystemGeometry& geom, const Codeword& codeword, const SamplingGrid& eval_grid) {
  const DesignChannels ch(geom, eval_grid);
  const CVec resp = ch.response(codeword.bs_precoder, codeword.ris_phases.values());
  RVec out(resp.size());
  for (Eigen::Index i = 0; i < resp.size(); ++i) {
    const double mag = std::abs(resp(i));
    out(i) = mag > 0.0 ? std::max(20.0 * std::log10(mag), kGainFloorDb) : kGainFloorDb;
  }
  return out;
}

double region_separation_db(const SystemGeometry& geom, const Codeword& codeword, const SamplingGrid& grid) {
  const RVec g = evaluate_beam_pattern(geom, codeword, grid);
  double in = 0.0, out = 0.0;
  int n_in = 0, n_out = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (codeword.region.contains(grid.points[i].x, grid.points[i].z)) {
      in += g(idx);
      ++n_in;
    } else {
      out += g(idx);
      ++n_out;
    }
  }
  if (n_in == 0) throw InvalidInput("region_separation_db: no grid point inside the codeword region");
  if (n_out == 0) return std::numeric_limits<double>::infinity();
  return in / n_in - out / n_out;
}

void CodebookSpec::validate() const {
  if (!(x_range.hi > x_range.lo) || !(z_range.hi > z_range.lo)) throw InvalidInput("codebook: empty x or z range");
  if (!(z_range.lo > 0.0)) throw InvalidInput("codebook: z range must lie in front of the RIS (z > 0)");
  if (levels.empty()) throw InvalidInput("codebook: at least one level is required");
  LevelSpec prev{1, 1};
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& lv = levels[l];
    if (lv.s_x < 1 || lv.s_z < 1 || lv.s_x % prev.s_x != 0 || lv.s_z % prev.s_z != 0) {
      throw InvalidInput("codebook: level " + std::to_string(l + 1) +
                         " region counts must be positive multiples of the previous level");
    }
    prev = lv;
  }
  if (design_s_x % prev.s_x != 0 || design_s_z % prev.s_z != 0) {
    throw InvalidInput("codebook: design sampling must be a multiple of the finest level's region counts");
  }
  if (!(gain_db > -300.0)) throw InvalidInput("codebook: invalid gain");
  ipdd.validate();
}

std::vector<const Codeword*> Codebook::children(int level, int parent) const {
  std::vector<const Codeword*> out;
  if (level < 1 || level > static_cast<int>(levels.size())) return out;
  for (const auto& cw : levels[static_cast<std::size_t>(level - 1)]) {
    if (cw.parent_index == parent) out.push_back(&cw);
  }
  return out;
}

Region level_region(const CodebookSpec& spec, int level, int index) {
  if (level == 0) return {spec.x_range, spec.z_range};
  const auto& lv = spec.levels.at(static_cast<std::size_t>(level - 1));
  const SamplingGrid tiling{level, spec.x_range, spec.z_range, lv.s_x, lv.s_z, 0.0, 0.0, {}};
  return tiling.cell(index % lv.s_x, index / lv.s_x);
}

SamplingGrid design_grid_for(const CodebookSpec& spec, int level, const Region& parent) {
  const LevelSpec up = level <= 1 ? LevelSpec{1, 1} : spec.levels.at(static_cast<std::size_t>(level - 2));
  return make_sampling_grid(parent.x, parent.z, spec.design_s_x / up.s_x, spec.design_s_z / up.s_z, level);
}

Codebook build_codebook(const SystemGeometry& geom, const CodebookSpec& spec, const BuildProgress& progress) {
  geom.validate();
  spec.validate();
  Codebook book;
  book.geometry_fingerprint = fingerprint(geom);
  book.bits = spec.ipdd.bits;
  const double gain = db_to_amplitude(spec.gain_db);

  for (int level = 1; level <= static_cast<int>(spec.levels.size()); ++level) {
    const auto& lv = spec.levels[static_cast<std::size_t>(level - 1)];
    const LevelSpec up = level == 1 ? LevelSpec{1, 1} : spec.levels[static_cast<std::size_t>(level - 2)];
    const int rx = lv.s_x / up.s_x;
    const int rz = lv.s_z / up.s_z;
    const int total = lv.s_x * lv.s_z;
    std::vector<Codeword> words(static_cast<std::size_t>(total));
    int done = 0;

    for (int parent = 0; parent < up.s_x * up.s_z; ++parent) {
      const Region parent_region = level_region(spec, level - 1, parent);
      const SamplingGrid grid = design_grid_for(spec, level, parent_region);
      const DesignChannels ch(geom, grid);
      const int px = parent % up.s_x;
      const int pz = parent / up.s_x;
      for (int cz = 0; cz < rz; ++cz) {
        for (int cx = 0; cx < rx; ++cx) {
          const int index = (pz * rz + cz) * lv.s_x + (px * rx + cx);
          const Region region = level_region(spec, level, index);
          const DesiredPattern pattern = desired_pattern(grid, region, gain);
          CodewordDesign design = solve_socc(geom, ch, pattern, spec.ipdd, spec.ao);
          if (spec.method == CodebookMethod::jocc) design = solve_jocc(geom, ch, pattern, spec.ipdd, design, spec.ao);
          Codeword cw = std::move(design.codeword);
          cw.level = level;
          cw.region_index = index;
          cw.parent_index = level == 1 ? -1 : parent;
          cw.region = region;
          words[static_cast<std::size_t>(index)] = std::move(cw);
          if (progress) progress(level, ++done, total);
        }
      }
    }
    book.levels.push_back(std::move(words));
  }
  return book;
}

}  // namespace xlris
