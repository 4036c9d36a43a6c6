// SPDX-License-Identifier: Apache-2.0

#include "xlris/experiment.hpp"

#include "xlris/beam_training.hpp"
#include "xlris/codebook_io.hpp"
#include "xlris/csv.hpp"
#include "xlris/hybrid.hpp"
#include "xlris/multiuser_im.hpp"
#include "xlris/rates.hpp"
#include "xlris/wmmse.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef XLRIS_VERSION
#define XLRIS_VERSION "0.0.0"
#endif

namespace xlris {

using nlohmann::json;
namespace fs = std::filesystem;

std::string library_version() { return XLRIS_VERSION; }

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Uniform [0, 1) from the top 53 bits; unlike the std distributions this is the
// same on every standard library.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<Point3> random_users(std::mt19937_64& rng, int users, Interval x_range, Interval z_range,
                                 double plane_y) {
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(users));
  for (int k = 0; k < users; ++k) {
    const double x = x_range.lo + x_range.width() * unit_uniform(rng);
    const double z = z_range.lo + z_range.width() * unit_uniform(rng);
    out.push_back({x, plane_y, z});
  }
  return out;
}

namespace {

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  std::ostream* log;
  std::vector<Artifact> artifacts;
  std::mutex mu;

  void note(const std::string& msg) {
    if (log) {
      std::lock_guard lock(mu);
      *log << "[xlris] " << msg << '\n';
    }
  }
  void emit(const std::string& name, const std::string& content) {
    write_file_atomic(out / name, content);
    std::lock_guard lock(mu);
    artifacts.push_back({name, content_hash(content)});
  }
  void emit_csv(const std::string& name, const CsvTable& table) {
    if (table.rows.empty()) throw InvalidInput("refusing to export an empty trace to " + name);
    emit(name, to_csv_string(table));
  }
};

template <typename F>
void stage(Context& ctx, const std::string& name, F&& body) {
  ctx.note(name + ": start");
  try {
    body();
  } catch (const std::exception& e) {
    ctx.note(name + ": failed: " + e.what());
    throw std::runtime_error("stage '" + name + "' failed: " + e.what());
  }
  ctx.note(name + ": done");
}

double to_db(double linear) {
  return linear > 0.0 ? 10.0 * std::log10(linear) : -std::numeric_limits<double>::infinity();
}

double safe_jain(const RVec& rates) {
  try {
    return jain_index(rates);
  } catch (const InvalidInput&) {
    return 0.0;
  }
}

// ---------------------------------------------------------------- codebook

Codebook obtain_codebook(Context& ctx, const SystemGeometry& geom, const CodebookSpec& spec) {
  if (ctx.cfg.codebook_path) {
    ctx.note("loading codebook " + *ctx.cfg.codebook_path);
    return load_codebook(*ctx.cfg.codebook_path, fingerprint(geom));
  }
  int last = -1;
  return build_codebook(geom, spec, [&](int level, int done, int total) {
    const int pct = total > 0 ? 100 * done / total : 100;
    if (pct / 10 != last || done == total) {
      last = pct / 10;
      ctx.note("codebook level " + std::to_string(level) + ": " + std::to_string(done) + "/" + std::to_string(total));
    }
  });
}

CsvTable codebook_table(const SystemGeometry& geom, const CodebookSpec& spec, const Codebook& book) {
  CsvTable t;
  t.header = {"level", "region_index", "parent_index", "x_lo_m", "x_hi_m", "z_lo_m", "z_hi_m", "objective",
              "separation_db"};
  for (const auto& level : book.levels) {
    for (const auto& cw : level) {
      const Region parent = cw.level == 1 ? Region{spec.x_range, spec.z_range}
                                          : book.levels[cw.level - 2][cw.parent_index].region;
      const double sep = region_separation_db(geom, cw, design_grid_for(spec, cw.level, parent));
      t.add({std::int64_t{cw.level}, std::int64_t{cw.region_index}, std::int64_t{cw.parent_index}, cw.region.x.lo,
             cw.region.x.hi, cw.region.z.lo, cw.region.z.hi, cw.objective, sep});
    }
  }
  return t;
}

// Level-1 patterns on the finest region lattice of the full range.
CsvTable pattern_table(const SystemGeometry& geom, const CodebookSpec& spec, const Codebook& book) {
  const LevelSpec fine = spec.levels.back();
  const SamplingGrid grid = make_sampling_grid(spec.x_range, spec.z_range, fine.s_x, fine.s_z, 1);
  CsvTable t;
  t.header = {"level", "region_index", "x_m", "z_m", "gain_db"};
  for (const auto& cw : book.levels.front()) {
    const RVec g = evaluate_beam_pattern(geom, cw, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.add({std::int64_t{cw.level}, std::int64_t{cw.region_index}, grid.points[i].x, grid.points[i].z,
             g(static_cast<Eigen::Index>(i))});
    }
  }
  return t;
}

void run_codebook(Context& ctx) {
  const auto& geom = *ctx.cfg.geometry;
  const auto& spec = *ctx.cfg.codebook;
  Codebook book;
  stage(ctx, "build", [&] { book = obtain_codebook(ctx, geom, spec); });
  stage(ctx, "export", [&] {
    ctx.emit("codebook.json", codebook_to_json(book));
    ctx.emit_csv("codebook.csv", codebook_table(geom, spec, book));
    ctx.emit_csv("beam_pattern.csv", pattern_table(geom, spec, book));
  });
}

// ---------------------------------------------------------------- training

void run_train(Context& ctx) {
  const auto& geom = *ctx.cfg.geometry;
  const auto& spec = *ctx.cfg.codebook;
  const auto& tb = *ctx.cfg.training;
  const std::uint64_t seed = *ctx.cfg.seed;

  Codebook book;
  stage(ctx, "codebook", [&] { book = obtain_codebook(ctx, geom, spec); });

  // With an SNR the probe noise is referenced to the design gain: a probe that
  // reaches C_g sees exactly snr_db.
  const double gain = db_to_amplitude(spec.gain_db);
  const double noise = tb.snr_db ? gain * gain / db_to_linear_power(*tb.snr_db) : geom.noise_power_w;
  const NoiseMode mode = tb.snr_db ? NoiseMode::noisy : NoiseMode::deterministic;

  CsvTable probes;
  probes.header = {"placement", "scheme", "level", "region_index", "snr_db"};
  CsvTable summary;
  summary.header = {"placement", "user_x_m", "user_z_m", "scheme", "leaf_index", "est_x_m",
                    "est_z_m", "contains_user", "leaf_snr_db", "rate", "probes"};
  json placements = json::array();
  int hits_h = 0, hits_e = 0;
  double rate_h = 0.0, rate_e = 0.0;

  stage(ctx, "train", [&] {
    for (int p = 0; p < tb.placements; ++p) {
      auto placement_rng = seeded_engine(seed, static_cast<std::uint64_t>(p));
      const Point3 user = random_users(placement_rng, 1, tb.x_range, tb.z_range, geom.user_plane_y_m).front();
      auto record = [&](const std::string& scheme, const TrainingResult& r) {
        for (const auto& pr : r.probes) {
          probes.add({std::int64_t{p}, scheme, std::int64_t{pr.level}, std::int64_t{pr.region_index}, to_db(pr.snr)});
        }
        const Codeword& leaf = book.levels.back()[r.selected_path.back()];
        const bool hit = leaf.region.contains(user.x, user.z);
        summary.add({std::int64_t{p}, user.x, user.z, scheme, std::int64_t{r.selected_path.back()}, r.estimated_user.x,
                     r.estimated_user.z, std::int64_t{hit ? 1 : 0}, to_db(r.leaf_snr), r.achieved_rate,
                     std::int64_t{r.probes_used}});
        return hit;
      };
      // The noise stream is separate from the placement stream so enabling the
      // exhaustive sweep leaves the hierarchical draws unchanged.
      auto noise_rng = seeded_engine(seed, (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(p));
      const TrainingResult h = hierarchical_train(book, geom, user, noise, mode, &noise_rng);
      hits_h += record("hierarchical", h) ? 1 : 0;
      rate_h += h.achieved_rate;
      json entry = {{"placement", p},
                    {"user", {user.x, user.z}},
                    {"hierarchical", {{"path", h.selected_path}, {"estimate", {h.estimated_user.x, h.estimated_user.z}},
                                      {"rate", h.achieved_rate}}}};
      if (tb.exhaustive) {
        auto ex_rng = seeded_engine(seed, (std::uint64_t{2} << 32) + static_cast<std::uint64_t>(p));
        const TrainingResult e = exhaustive_train(book, geom, user, noise, mode, &ex_rng);
        hits_e += record("exhaustive", e) ? 1 : 0;
        rate_e += e.achieved_rate;
        entry["exhaustive"] = {{"leaf", e.selected_path.back()},
                               {"estimate", {e.estimated_user.x, e.estimated_user.z}},
                               {"rate", e.achieved_rate}};
      }
      placements.push_back(std::move(entry));
    }
  });

  stage(ctx, "export", [&] {
    ctx.emit_csv("train_probes.csv", probes);
    ctx.emit_csv("train_summary.csv", summary);
    json s = {{"placements", tb.placements},
              {"noise_power_w", noise},
              {"noisy", tb.snr_db.has_value()},
              {"hierarchical", {{"hits", hits_h}, {"mean_rate", rate_h / tb.placements}}},
              {"runs", placements}};
    if (tb.exhaustive) s["exhaustive"] = {{"hits", hits_e}, {"mean_rate", rate_e / tb.placements}};
    ctx.emit("train_summary.json", s.dump(1));
  });
}

// ---------------------------------------------------------------- multiuser

struct MultiuserCase {
  SystemGeometry geom;
  ImBlock im;
};

std::vector<CMat> instance_channels(const MultiuserCase& c, std::uint64_t seed, std::uint64_t stream) {
  auto rng = seeded_engine(seed, stream);
  const auto users = random_users(rng, c.im.users, c.im.x_range, c.im.z_range, c.geom.user_plane_y_m);
  return make_channel_set(c.geom, users).cascaded;
}

MultiuserCase base_case(const ExperimentConfig& cfg) {
  MultiuserCase c{*cfg.geometry, *cfg.im};
  c.geom.m_antennas = c.im.m_antennas;
  return c;
}

FairnessParams fairness_params(const MultiuserCase& c) {
  FairnessParams p = FairnessParams::initial(c.geom.max_power_w, c.im.users);
  p.step = c.im.step;
  p.perturb = c.im.perturb;
  if (c.im.chi_init) {
    const auto& v = *c.im.chi_init;
    p.set_chi({v[0], v[1], v[2], v[3], v[4]});
  }
  p.validate();
  return p;
}

ImResult solve_im(const MultiuserCase& c, const IpddConfig& base, const std::vector<CMat>& ch) {
  ImConfig ic;
  ic.phase_method = c.im.phase_method;
  ic.adapt_rounds = c.im.adapt_rounds;
  ic.inner_rounds = c.im.inner_rounds;
  ic.probe_rounds = c.im.probe_rounds;
  ic.ipdd = base;
  ic.ipdd.bits = c.im.bits;
  return run_im(ch, fairness_params(c), c.geom.max_power_w, c.geom.noise_power_w, ic);
}

WmmseState solve_wmmse(const MultiuserCase& c, const IpddConfig& base, int iters, const std::vector<CMat>& ch) {
  WmmseConfig wc;
  wc.max_iters = iters;
  wc.ipdd = base;
  wc.ipdd.bits = c.im.bits;
  const auto start = multiuser_start(ch, c.geom.max_power_w, c.im.bits);
  return wmmse_sum_rate(ch, c.geom.max_power_w, c.geom.noise_power_w, start, wc);
}

std::vector<std::string> rate_columns(int users) {
  std::vector<std::string> cols;
  for (int k = 1; k <= users; ++k) cols.push_back("rate_" + std::to_string(k));
  return cols;
}

void append_rates(std::vector<CsvCell>& row, const RVec& rates) {
  for (Eigen::Index k = 0; k < rates.size(); ++k) row.emplace_back(rates(k));
}

void run_im_cmd(Context& ctx) {
  const MultiuserCase c = base_case(ctx.cfg);
  CsvTable trace;
  trace.header = {"instance", "iter", "alpha", "beta", "gamma1", "gamma2", "gamma3", "J", "sum_rate"};
  CsvTable summary;
  summary.header = {"instance", "best_iteration", "J", "sum_rate"};
  for (const auto& col : rate_columns(c.im.users)) {
    trace.header.push_back(col);
    summary.header.push_back(col);
  }
  for (int i = 0; i < c.im.instances; ++i) {
    stage(ctx, "im instance " + std::to_string(i), [&] {
      const auto ch = instance_channels(c, *ctx.cfg.seed, static_cast<std::uint64_t>(i));
      const ImResult r = solve_im(c, ctx.cfg.ipdd, ch);
      for (const auto& row : r.trace) {
        std::vector<CsvCell> cells{std::int64_t{i}, std::int64_t{row.iteration}, row.chi[0], row.chi[1],
                                   row.chi[2], row.chi[3], row.chi[4], row.jain, row.sum_rate};
        append_rates(cells, row.rates);
        trace.add(std::move(cells));
      }
      std::vector<CsvCell> cells{std::int64_t{i}, std::int64_t{r.best_iteration}, r.best.jain, r.best.sum_rate};
      append_rates(cells, r.best.rates);
      summary.add(std::move(cells));
    });
  }
  stage(ctx, "export", [&] {
    ctx.emit_csv("im_trace.csv", trace);
    ctx.emit_csv("im_summary.csv", summary);
  });
}

void run_wmmse_cmd(Context& ctx) {
  const MultiuserCase c = base_case(ctx.cfg);
  CsvTable trace;
  trace.header = {"instance", "iteration", "sum_rate"};
  for (const auto& col : rate_columns(c.im.users)) trace.header.push_back(col);
  trace.header.push_back("J");
  for (int i = 0; i < c.im.instances; ++i) {
    stage(ctx, "wmmse instance " + std::to_string(i), [&] {
      const auto ch = instance_channels(c, *ctx.cfg.seed, static_cast<std::uint64_t>(i));
      const WmmseState st = solve_wmmse(c, ctx.cfg.ipdd, ctx.cfg.benchmark->wmmse_iters, ch);
      for (std::size_t it = 0; it < st.sum_rate_trace.size(); ++it) {
        std::vector<CsvCell> cells{std::int64_t{i}, static_cast<std::int64_t>(it), st.sum_rate_trace[it]};
        append_rates(cells, st.rate_trace[it]);
        cells.emplace_back(safe_jain(st.rate_trace[it]));
        trace.add(std::move(cells));
      }
    });
  }
  stage(ctx, "export", [&] { ctx.emit_csv("wmmse_trace.csv", trace); });
}

// ---------------------------------------------------------------- hybrid

void run_hybrid(Context& ctx) {
  const auto& hb = *ctx.cfg.hybrid;
  SystemGeometry geom = *ctx.cfg.geometry;
  CodebookSpec spec = *ctx.cfg.codebook;
  Codebook book;
  if (ctx.cfg.codebook_path) {
    stage(ctx, "codebook", [&] { book = load_codebook(*ctx.cfg.codebook_path, fingerprint(geom)); });
  } else {
    // Only the first level is designed here; the BS array takes the hybrid size.
    geom.m_antennas = hb.m_antennas;
    spec.levels.resize(1);
    stage(ctx, "codebook", [&] { book = obtain_codebook(ctx, geom, spec); });
  }
  IpddConfig ipdd = ctx.cfg.ipdd;
  ipdd.bits = hb.bits;
  CsvTable trace;
  trace.header = {"level", "region_index", "round", "residual", "relative_residual"};
  stage(ctx, "factorize", [&] {
    for (auto& level : book.levels) {
      for (auto& cw : level) {
        const double ref = cw.bs_precoder.squaredNorm();
        if (hb.rf_chains > cw.bs_precoder.size()) {
          throw InvalidInput("hybrid.rf_chains exceeds the BS antenna count of the codebook");
        }
        cw.hybrid = hybrid_factorize(cw.bs_precoder, hb.rf_chains, ipdd, geom.max_power_w, hb.rounds);
        for (std::size_t r = 0; r < cw.hybrid->residual_trace.size(); ++r) {
          const double res = cw.hybrid->residual_trace[r];
          trace.add({std::int64_t{cw.level}, std::int64_t{cw.region_index}, static_cast<std::int64_t>(r), res,
                     ref > 0.0 ? res / ref : 0.0});
        }
      }
    }
  });
  stage(ctx, "export", [&] {
    ctx.emit("hybrid_codebook.json", codebook_to_json(book));
    ctx.emit_csv("hybrid_trace.csv", trace);
  });
}

// ---------------------------------------------------------------- sweep

void run_sweep(Context& ctx) {
  const SweepBlock& sw = *ctx.cfg.sweep;
  const std::uint64_t seed = *ctx.cfg.seed;
  const int points = static_cast<int>(sw.values.size());
  const int jobs = points * sw.instances;
  fs::create_directories(ctx.out / "points");

  std::vector<std::string> results(static_cast<std::size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  std::atomic<int> next{0};

  auto work = [&] {
    for (int job = next++; job < jobs; job = next++) {
      const int p = job / sw.instances;
      const int inst = job % sw.instances;
      try {
        MultiuserCase c = base_case(ctx.cfg);
        const double value = sw.values[static_cast<std::size_t>(p)];
        if (sw.parameter == "n1") {
          c.geom.n1 = static_cast<int>(value);
        } else if (sw.parameter == "m_antennas") {
          c.geom.m_antennas = c.im.m_antennas = static_cast<int>(value);
        } else if (sw.parameter == "bits") {
          c.im.bits = static_cast<int>(value);
        } else {
          c.geom.max_power_w = dbm_to_watt(value);
        }
        c.geom.validate();
        // Instances share channels across sweep values where the geometry allows.
        const auto ch = instance_channels(c, seed, static_cast<std::uint64_t>(inst));
        const ImResult im = solve_im(c, ctx.cfg.ipdd, ch);
        const WmmseState wm = solve_wmmse(c, ctx.cfg.ipdd, ctx.cfg.benchmark->wmmse_iters, ch);
        const RVec wm_rates = achievable_rates(ch, wm.w_matrix, wm.ris_phases.values(), c.geom.noise_power_w);
        CsvTable t;
        t.header = {"parameter", "value", "instance", "method", "sum_rate", "J", "min_rate"};
        t.add({sw.parameter, value, std::int64_t{inst}, std::string("im"), im.best.sum_rate, im.best.jain,
               im.best.rates.minCoeff()});
        t.add({sw.parameter, value, std::int64_t{inst}, std::string("wmmse"), wm_rates.sum(), safe_jain(wm_rates),
               wm_rates.minCoeff()});
        const std::string name = "points/point_" + std::to_string(p) + "_" + std::to_string(inst) + ".csv";
        ctx.emit_csv(name, t);
        results[static_cast<std::size_t>(job)] = to_csv_string(t);
        std::ostringstream msg;
        msg << "sweep " << sw.parameter << '=' << value << " instance " << inst << " done";
        ctx.note(msg.str());
      } catch (...) {
        errors[static_cast<std::size_t>(job)] = std::current_exception();
      }
    }
  };

  stage(ctx, "sweep", [&] {
    int workers = sw.workers > 0 ? sw.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, jobs));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (int job = 0; job < jobs; ++job) {
      if (errors[static_cast<std::size_t>(job)]) {
        try {
          std::rethrow_exception(errors[static_cast<std::size_t>(job)]);
        } catch (const std::exception& e) {
          throw std::runtime_error("point " + std::to_string(job / sw.instances) + " instance " +
                                   std::to_string(job % sw.instances) + ": " + e.what());
        }
      }
    }
  });

  stage(ctx, "export", [&] {
    // Concatenate in job order so the combined file does not depend on scheduling.
    std::string combined;
    for (int job = 0; job < jobs; ++job) {
      const std::string& s = results[static_cast<std::size_t>(job)];
      combined += job == 0 ? s : s.substr(s.find('\n') + 1);
    }
    ctx.emit("sweep.csv", combined);
  });
}

}  // namespace

RunReport run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, const fs::path& out_dir,
                         std::ostream* log) {
  require_blocks(cfg, subcommand);
  fs::create_directories(out_dir);
  Context ctx{cfg, out_dir, log, {}, {}};

  if (subcommand == "codebook build") {
    run_codebook(ctx);
  } else if (subcommand == "train") {
    run_train(ctx);
  } else if (subcommand == "im") {
    run_im_cmd(ctx);
  } else if (subcommand == "wmmse") {
    run_wmmse_cmd(ctx);
  } else if (subcommand == "hybrid") {
    run_hybrid(ctx);
  } else {
    run_sweep(ctx);
  }

  std::sort(ctx.artifacts.begin(), ctx.artifacts.end(),
            [](const Artifact& a, const Artifact& b) { return a.name < b.name; });
  RunReport report;
  report.subcommand = subcommand;
  report.config_hash = content_hash(cfg.canonical_json);
  report.seed = cfg.seed.value_or(0);
  report.artifacts = ctx.artifacts;

  json manifest = {{"format", "xlris-manifest"},
                   {"version", library_version()},
                   {"subcommand", subcommand},
                   {"config_hash", report.config_hash},
                   {"config", json::parse(cfg.canonical_json)}};
  manifest["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  json arts = json::array();
  for (const auto& a : report.artifacts) arts.push_back({{"name", a.name}, {"hash", a.hash}});
  manifest["artifacts"] = arts;
  report.manifest = out_dir / "manifest.json";
  write_file_atomic(report.manifest, manifest.dump(1) + "\n");
  return report;
}

}  // namespace xlris
