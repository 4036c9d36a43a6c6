// SPDX-License-Identifier: Apache-2.0

#include "xlris/codebook_io.hpp"

#include "xlris/csv.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace xlris {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "xlris-codebook";
constexpr int kFormatVersion = 1;

json complex_array(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

CVec complex_vector(const json& a, const std::string& what) {
  if (!a.is_array()) throw InvalidInput("codebook json: " + what + " must be an array of [re, im] pairs");
  CVec v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = a[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InvalidInput("codebook json: " + what + "[" + std::to_string(i) + "] is not an [re, im] pair");
    }
    v(static_cast<Eigen::Index>(i)) = cplx(p[0].get<double>(), p[1].get<double>());
  }
  return v;
}

json phases_json(const DiscretePhaseVector& p) { return {{"bits", p.bits()}, {"indices", p.indices()}}; }

DiscretePhaseVector phases_from(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("bits") || !j.contains("indices")) {
    throw InvalidInput("codebook json: " + what + " needs bits and indices");
  }
  return DiscretePhaseVector(j.at("bits").get<int>(), j.at("indices").get<std::vector<int>>());
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

Interval interval_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput("codebook json: " + what + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string codebook_to_json(const Codebook& book) {
  json root;
  root["format"] = kFormat;
  root["format_version"] = kFormatVersion;
  root["geometry_fingerprint"] = hex64(book.geometry_fingerprint);
  root["bits"] = book.bits;
  json levels = json::array();
  for (const auto& level : book.levels) {
    json words = json::array();
    for (const auto& cw : level) {
      json w;
      w["level"] = cw.level;
      w["region_index"] = cw.region_index;
      w["parent_index"] = cw.parent_index;
      w["region"] = {{"x", interval_json(cw.region.x)}, {"z", interval_json(cw.region.z)}};
      w["objective"] = cw.objective;
      w["bs_precoder"] = complex_array(cw.bs_precoder);
      w["ris_phases"] = phases_json(cw.ris_phases);
      if (cw.hybrid) {
        const auto& h = *cw.hybrid;
        w["hybrid"] = {{"antennas", h.antennas},
                       {"rf_chains", h.rf_chains},
                       {"analog", phases_json(h.analog)},
                       {"digital", complex_array(h.digital)},
                       {"residual", h.residual}};
      }
      words.push_back(std::move(w));
    }
    levels.push_back(std::move(words));
  }
  root["levels"] = std::move(levels);
  return root.dump(1) + "\n";
}

Codebook codebook_from_json(const std::string& text, std::optional<std::uint64_t> expected_fingerprint) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("codebook json: ") + e.what());
  }
  try {
    if (root.value("format", std::string()) != kFormat) throw InvalidInput("codebook json: not an xlris codebook");
    if (root.value("format_version", 0) != kFormatVersion) throw InvalidInput("codebook json: unsupported format_version");
    Codebook book;
    book.geometry_fingerprint = std::stoull(root.at("geometry_fingerprint").get<std::string>(), nullptr, 16);
    if (expected_fingerprint && *expected_fingerprint != book.geometry_fingerprint) {
      throw InvalidInput("codebook json: geometry fingerprint " + hex64(book.geometry_fingerprint) +
                         " does not match the configured geometry " + hex64(*expected_fingerprint));
    }
    book.bits = root.at("bits").get<int>();
    for (const auto& level : root.at("levels")) {
      std::vector<Codeword> words;
      for (const auto& w : level) {
        Codeword cw;
        cw.level = w.at("level").get<int>();
        cw.region_index = w.at("region_index").get<int>();
        cw.parent_index = w.at("parent_index").get<int>();
        cw.region = {interval_from(w.at("region").at("x"), "region.x"), interval_from(w.at("region").at("z"), "region.z")};
        cw.objective = w.at("objective").get<double>();
        cw.bs_precoder = complex_vector(w.at("bs_precoder"), "bs_precoder");
        cw.ris_phases = phases_from(w.at("ris_phases"), "ris_phases");
        if (w.contains("hybrid")) {
          const auto& h = w.at("hybrid");
          HybridPrecoder hp;
          hp.antennas = h.at("antennas").get<Eigen::Index>();
          hp.rf_chains = h.at("rf_chains").get<Eigen::Index>();
          hp.analog = phases_from(h.at("analog"), "hybrid.analog");
          hp.digital = complex_vector(h.at("digital"), "hybrid.digital");
          hp.residual = h.at("residual").get<double>();
          if (static_cast<Eigen::Index>(hp.analog.size()) != hp.antennas * hp.rf_chains ||
              hp.digital.size() != hp.rf_chains) {
            throw InvalidInput("codebook json: hybrid dimensions are inconsistent");
          }
          cw.hybrid = std::move(hp);
        }
        words.push_back(std::move(cw));
      }
      book.levels.push_back(std::move(words));
    }
    return book;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("codebook json: ") + e.what());
  }
}

void save_codebook(const Codebook& book, const std::filesystem::path& path) {
  write_file_atomic(path, codebook_to_json(book));
}

Codebook load_codebook(const std::filesystem::path& path, std::optional<std::uint64_t> expected_fingerprint) {
  return codebook_from_json(read_file(path), expected_fingerprint);
}

}  // namespace xlris
