// SPDX-License-Identifier: Apache-2.0

#include "xlris/config.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace xlris {

using nlohmann::json;

namespace {

constexpr const char* kDeskProfile = R"({
  "seed": 1,
  "geometry": {
    "wavelength_m": 0.03, "n1": 32, "n2": 4, "m_antennas": 4,
    "bs_position_m": [-40.0, 0.0, -25.0], "user_plane_y_m": 0.0,
    "max_power_dbm": 40.0, "noise_power_dbm": -110.0
  },
  "ipdd": {"penalty_init": 10.0, "penalty_decay": 0.8, "consensus_tol": 1e-4, "max_outer_iters": 200,
           "polish_sweeps": 20, "multistart": false},
  "codebook": {
    "x_range_lambda": [-1000, 1000], "z_range_lambda": [500, 2500],
    "levels": [[8, 4], [64, 16]], "design_grid": [256, 32],
    "gain_db": 40.0, "method": "jocc", "bits": 2,
    "ao": {"max_outer_iters": 50, "rel_tol": 1e-6}
  },
  "training": {"placements": 100, "snr_db": null, "exhaustive": true},
  "im": {"users": 3, "m_antennas": 8, "bits": 3, "instances": 10,
         "x_range_m": [-30.0, 30.0], "z_range_m": [15.0, 75.0],
         "phase_method": "ipdd", "adapt_rounds": 10, "inner_rounds": 20, "probe_rounds": 5,
         "step": 0.1, "perturb": 0.01},
  "benchmark": {"wmmse_iters": 50},
  "hybrid": {"m_antennas": 16, "rf_chains": 4, "bits": 2, "rounds": 20},
  "sweep": {"parameter": "bits", "values": [1, 2, 3], "instances": 3, "workers": 0}
})";

constexpr const char* kPaperProfile = R"({
  "seed": 1,
  "geometry": {
    "wavelength_m": 0.03, "n1": 128, "n2": 4, "m_antennas": 4,
    "bs_position_m": [-40.0, 0.0, -25.0], "user_plane_y_m": 0.0,
    "max_power_dbm": 40.0, "noise_power_dbm": -110.0
  },
  "ipdd": {"penalty_init": 10.0, "penalty_decay": 0.8, "consensus_tol": 1e-4, "max_outer_iters": 200,
           "polish_sweeps": 20, "multistart": false},
  "codebook": {
    "x_range_lambda": [-1000, 1000], "z_range_lambda": [500, 2500],
    "levels": [[8, 4], [64, 16]], "design_grid": [256, 32],
    "gain_db": 30.0, "method": "jocc", "bits": 2,
    "ao": {"max_outer_iters": 50, "rel_tol": 1e-6}
  },
  "training": {"placements": 100, "snr_db": 6.0, "exhaustive": false},
  "im": {"users": 3, "m_antennas": 16, "bits": 3, "instances": 10,
         "x_range_m": [-30.0, 30.0], "z_range_m": [15.0, 75.0],
         "phase_method": "ipdd", "adapt_rounds": 10, "inner_rounds": 20, "probe_rounds": 5,
         "step": 0.1, "perturb": 0.01},
  "benchmark": {"wmmse_iters": 50},
  "hybrid": {"m_antennas": 16, "rf_chains": 4, "bits": 2, "rounds": 20},
  "sweep": {"parameter": "n1", "values": [32, 64, 128], "instances": 3, "workers": 0}
})";

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput("config: " + path_ + " must be an object");
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  [[nodiscard]] std::string field(const char* key) const { return path_ + "." + key; }

  double real(const char* key, double def) const { return has(key) ? real(key) : def; }
  double real(const char* key) const {
    const json& v = need(key);
    if (!v.is_number()) throw InvalidInput("config: " + field(key) + " must be a number");
    return v.get<double>();
  }
  int integer(const char* key, int def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw InvalidInput("config: " + field(key) + " must be an integer");
    return v.get<int>();
  }
  bool boolean(const char* key, bool def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) throw InvalidInput("config: " + field(key) + " must be true or false");
    return j_.at(key).get<bool>();
  }
  std::string text(const char* key, const std::string& def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_string()) throw InvalidInput("config: " + field(key) + " must be a string");
    return j_.at(key).get<std::string>();
  }
  std::vector<double> reals(const char* key, std::size_t n) const {
    const json& v = need(key);
    if (!v.is_array() || (n != 0 && v.size() != n)) {
      throw InvalidInput("config: " + field(key) + " must be an array of " + (n ? std::to_string(n) : "") + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw InvalidInput("config: " + field(key) + " must contain numbers only");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Interval interval(const char* key) const {
    const auto v = reals(key, 2);
    if (!(v[1] > v[0])) throw InvalidInput("config: " + field(key) + " must be [lo, hi] with hi > lo");
    return {v[0], v[1]};
  }
  Reader sub(const char* key) const { return Reader(need(key), field(key)); }
  const json& need(const char* key) const {
    if (!has(key)) throw InvalidInput("config: missing " + field(key));
    return j_.at(key);
  }

 private:
  const json& j_;
  std::string path_;
};

SystemGeometry parse_geometry(const Reader& r) {
  SystemGeometry g;
  g.wavelength_m = r.real("wavelength_m");
  g.element_spacing_m = r.real("element_spacing_m", g.wavelength_m / 2.0);
  g.n1 = r.integer("n1", g.n1);
  g.n2 = r.integer("n2", g.n2);
  g.m_antennas = r.integer("m_antennas", g.m_antennas);
  if (r.has("bs_position_m")) {
    const auto b = r.reals("bs_position_m", 3);
    g.bs_position_m = {b[0], b[1], b[2]};
  }
  g.user_plane_y_m = r.real("user_plane_y_m", 0.0);
  if (r.has("max_power_dbm") && r.has("max_power_w")) {
    throw InvalidInput("config: give only one of geometry.max_power_dbm and geometry.max_power_w");
  }
  if (r.has("noise_power_dbm") && r.has("noise_power_w")) {
    throw InvalidInput("config: give only one of geometry.noise_power_dbm and geometry.noise_power_w");
  }
  g.max_power_w = r.has("max_power_dbm") ? dbm_to_watt(r.real("max_power_dbm")) : r.real("max_power_w", 10.0);
  g.noise_power_w = r.has("noise_power_dbm") ? dbm_to_watt(r.real("noise_power_dbm")) : r.real("noise_power_w", 1e-14);
  try {
    g.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return g;
}

IpddConfig parse_ipdd(const Reader& r, IpddConfig c) {
  c.penalty_init = r.real("penalty_init", c.penalty_init);
  c.penalty_decay = r.real("penalty_decay", c.penalty_decay);
  c.consensus_tol = r.real("consensus_tol", c.consensus_tol);
  c.max_outer_iters = r.integer("max_outer_iters", c.max_outer_iters);
  c.polish_sweeps = r.integer("polish_sweeps", c.polish_sweeps);
  c.multistart = r.boolean("multistart", c.multistart);
  c.bits = r.integer("bits", c.bits);
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return c;
}

Interval range_of(const Reader& r, const char* meters, const char* lambdas, double wavelength, const std::string& name) {
  if (r.has(meters) && r.has(lambdas)) throw InvalidInput("config: give only one of " + r.field(meters) + " and " + r.field(lambdas));
  if (r.has(meters)) return r.interval(meters);
  if (r.has(lambdas)) {
    const Interval l = r.interval(lambdas);
    return {l.lo * wavelength, l.hi * wavelength};
  }
  throw InvalidInput("config: missing " + name);
}

CodebookSpec parse_codebook(const Reader& r, const SystemGeometry& g, const IpddConfig& base) {
  CodebookSpec s;
  s.x_range = range_of(r, "x_range_m", "x_range_lambda", g.wavelength_m, r.field("x_range_m"));
  s.z_range = range_of(r, "z_range_m", "z_range_lambda", g.wavelength_m, r.field("z_range_m"));
  const json& levels = r.need("levels");
  if (!levels.is_array() || levels.empty()) throw InvalidInput("config: codebook.levels must be a non-empty array");
  for (const auto& lv : levels) {
    if (!lv.is_array() || lv.size() != 2 || !lv[0].is_number_integer() || !lv[1].is_number_integer()) {
      throw InvalidInput("config: codebook.levels entries must be [s_x, s_z] integer pairs");
    }
    s.levels.push_back({lv[0].get<int>(), lv[1].get<int>()});
  }
  const auto grid = r.reals("design_grid", 2);
  s.design_s_x = static_cast<int>(grid[0]);
  s.design_s_z = static_cast<int>(grid[1]);
  s.gain_db = r.real("gain_db", s.gain_db);
  const std::string method = r.text("method", "jocc");
  if (method == "jocc") {
    s.method = CodebookMethod::jocc;
  } else if (method == "socc") {
    s.method = CodebookMethod::socc;
  } else {
    throw InvalidInput("config: codebook.method must be \"jocc\" or \"socc\"");
  }
  s.ipdd = base;
  s.ipdd.bits = r.integer("bits", base.bits);
  if (r.has("ipdd")) s.ipdd = parse_ipdd(r.sub("ipdd"), s.ipdd);
  if (r.has("ao")) {
    const Reader ao = r.sub("ao");
    s.ao.max_outer_iters = ao.integer("max_outer_iters", s.ao.max_outer_iters);
    s.ao.rel_tol = ao.real("rel_tol", s.ao.rel_tol);
    if (s.ao.max_outer_iters < 1 || !(s.ao.rel_tol >= 0.0)) throw InvalidInput("config: codebook.ao is invalid");
  }
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return s;
}

void positive(int v, const std::string& field) {
  if (v < 1) throw InvalidInput("config: " + field + " must be >= 1");
}

}  // namespace

std::string profile_json(Profile p) { return p == Profile::desk ? kDeskProfile : kPaperProfile; }

std::string merge_json(const std::string& base, const std::string& patch) {
  json b = json::parse(base);
  b.merge_patch(json::parse(patch));
  return b.dump();
}

std::string unwrap_manifest(const std::string& text) {
  const json j = json::parse(text);
  if (j.is_object() && j.value("format", std::string()) == "xlris-manifest") {
    if (!j.contains("config")) throw InvalidInput("manifest has no config block");
    return j.at("config").dump();
  }
  return text;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(unwrap_manifest(text));
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: not valid JSON: ") + e.what());
  }
  const Reader r(root, "config");
  static const std::set<std::string> known = {"seed", "geometry", "ipdd", "codebook", "codebook_path", "training",
                                              "im", "benchmark", "hybrid", "sweep", "output_dir"};
  for (const auto& [key, _] : root.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown block \"" + key + "\"");
  }

  ExperimentConfig cfg;
  if (r.has("seed")) {
    if (!root.at("seed").is_number_unsigned()) throw InvalidInput("config: seed must be a non-negative integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  if (r.has("ipdd")) cfg.ipdd = parse_ipdd(r.sub("ipdd"), cfg.ipdd);
  if (r.has("geometry")) cfg.geometry = parse_geometry(Reader(root.at("geometry"), "geometry"));
  if (r.has("codebook")) {
    if (!cfg.geometry) throw InvalidInput("config: the codebook block needs a geometry block");
    cfg.codebook = parse_codebook(Reader(root.at("codebook"), "codebook"), *cfg.geometry, cfg.ipdd);
  }
  if (r.has("codebook_path")) cfg.codebook_path = r.text("codebook_path", "");
  if (r.has("training")) {
    const Reader t(root.at("training"), "training");
    TrainingBlock b;
    b.placements = t.integer("placements", b.placements);
    positive(b.placements, "training.placements");
    if (t.has("snr_db")) b.snr_db = t.real("snr_db");
    b.exhaustive = t.boolean("exhaustive", b.exhaustive);
    if (t.has("x_range_m")) b.x_range = t.interval("x_range_m");
    else if (cfg.codebook) b.x_range = cfg.codebook->x_range;
    if (t.has("z_range_m")) b.z_range = t.interval("z_range_m");
    else if (cfg.codebook) b.z_range = cfg.codebook->z_range;
    cfg.training = b;
  }
  if (r.has("im")) {
    const Reader t(root.at("im"), "im");
    ImBlock b;
    b.users = t.integer("users", b.users);
    b.m_antennas = t.integer("m_antennas", b.m_antennas);
    b.bits = t.integer("bits", b.bits);
    b.instances = t.integer("instances", b.instances);
    positive(b.users, "im.users");
    positive(b.m_antennas, "im.m_antennas");
    positive(b.instances, "im.instances");
    if (b.bits < 1 || b.bits > 24) throw InvalidInput("config: im.bits must lie in [1, 24]");
    b.x_range = t.interval("x_range_m");
    b.z_range = t.interval("z_range_m");
    if (!(b.z_range.lo > 0.0)) throw InvalidInput("config: im.z_range_m must lie in front of the RIS (z > 0)");
    const std::string pm = t.text("phase_method", "ipdd");
    if (pm == "ipdd") {
      b.phase_method = PhaseMethod::ipdd;
    } else if (pm == "cfm") {
      b.phase_method = PhaseMethod::cfm;
    } else {
      throw InvalidInput("config: im.phase_method must be \"ipdd\" or \"cfm\"");
    }
    b.adapt_rounds = t.integer("adapt_rounds", b.adapt_rounds);
    b.inner_rounds = t.integer("inner_rounds", b.inner_rounds);
    b.probe_rounds = t.integer("probe_rounds", b.probe_rounds);
    positive(b.adapt_rounds, "im.adapt_rounds");
    positive(b.inner_rounds, "im.inner_rounds");
    positive(b.probe_rounds, "im.probe_rounds");
    b.step = t.real("step", b.step);
    b.perturb = t.real("perturb", b.perturb);
    if (!(b.step >= 0.0) || !(b.perturb > 0.0)) throw InvalidInput("config: im.step must be >= 0 and im.perturb > 0");
    if (t.has("chi_init")) b.chi_init = t.reals("chi_init", 5);
    cfg.im = b;
  }
  if (r.has("benchmark")) {
    const Reader t(root.at("benchmark"), "benchmark");
    BenchmarkBlock b;
    b.wmmse_iters = t.integer("wmmse_iters", b.wmmse_iters);
    positive(b.wmmse_iters, "benchmark.wmmse_iters");
    cfg.benchmark = b;
  }
  if (r.has("hybrid")) {
    const Reader t(root.at("hybrid"), "hybrid");
    HybridBlock b;
    b.m_antennas = t.integer("m_antennas", b.m_antennas);
    b.rf_chains = t.integer("rf_chains", b.rf_chains);
    b.bits = t.integer("bits", b.bits);
    b.rounds = t.integer("rounds", b.rounds);
    positive(b.m_antennas, "hybrid.m_antennas");
    if (b.rf_chains < 1 || b.rf_chains > b.m_antennas) throw InvalidInput("config: hybrid.rf_chains must lie in [1, m_antennas]");
    if (b.bits < 1 || b.bits > 24) throw InvalidInput("config: hybrid.bits must lie in [1, 24]");
    if (b.rounds < 0) throw InvalidInput("config: hybrid.rounds must be >= 0");
    cfg.hybrid = b;
  }
  if (r.has("sweep")) {
    const Reader t(root.at("sweep"), "sweep");
    SweepBlock b;
    b.parameter = t.text("parameter", "");
    static const std::set<std::string> params = {"n1", "m_antennas", "bits", "max_power_dbm"};
    if (!params.count(b.parameter)) {
      throw InvalidInput("config: sweep.parameter must be one of n1, m_antennas, bits, max_power_dbm");
    }
    b.values = t.reals("values", 0);
    if (b.values.empty()) throw InvalidInput("config: sweep.values must not be empty");
    b.instances = t.integer("instances", b.instances);
    positive(b.instances, "sweep.instances");
    b.workers = t.integer("workers", 0);
    if (b.workers < 0) throw InvalidInput("config: sweep.workers must be >= 0");
    cfg.sweep = b;
  }
  cfg.canonical_json = root.dump();
  return cfg;
}

void require_blocks(const ExperimentConfig& cfg, const std::string& subcommand) {
  auto need = [&](bool present, const char* block) {
    if (!present) throw InvalidInput("config: subcommand '" + subcommand + "' needs the \"" + block + "\" block");
  };
  need(cfg.geometry.has_value(), "geometry");
  if (subcommand == "codebook build") {
    need(cfg.codebook.has_value(), "codebook");
  } else if (subcommand == "train") {
    need(cfg.codebook.has_value(), "codebook");
    need(cfg.training.has_value(), "training");
    need(cfg.seed.has_value(), "seed");
  } else if (subcommand == "im" || subcommand == "wmmse") {
    need(cfg.im.has_value(), "im");
    need(cfg.benchmark.has_value(), "benchmark");
    need(cfg.seed.has_value(), "seed");
  } else if (subcommand == "hybrid") {
    need(cfg.codebook.has_value(), "codebook");
    need(cfg.hybrid.has_value(), "hybrid");
  } else if (subcommand == "sweep") {
    need(cfg.im.has_value(), "im");
    need(cfg.benchmark.has_value(), "benchmark");
    need(cfg.sweep.has_value(), "sweep");
    need(cfg.seed.has_value(), "seed");
  } else {
    throw InvalidInput("unknown subcommand '" + subcommand + "'");
  }
}

}  // namespace xlris
