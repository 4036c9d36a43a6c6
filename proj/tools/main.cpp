// SPDX-License-Identifier: Apache-2.0
//
// xlris command-line front end. Configuration comes from --profile, --config or
// both (the file is merged over the profile); a run manifest is accepted as a
// config and reproduces that run.

#include "xlris/config.hpp"
#include "xlris/csv.hpp"
#include "xlris/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string profile;
  std::string codebook_path;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "Config JSON or a run manifest");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--profile", o.profile, "Preset to start from")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_flag("-q,--quiet", o.quiet, "No progress log on stderr");
}

std::string resolve_config_text(const Options& o) {
  std::string text;
  if (!o.profile.empty()) {
    text = xlris::profile_json(o.profile == "desk" ? xlris::Profile::desk : xlris::Profile::paper);
  }
  if (!o.config_path.empty()) {
    const std::string file = xlris::unwrap_manifest(xlris::read_file(o.config_path));
    text = text.empty() ? file : xlris::merge_json(text, file);
  }
  if (text.empty()) throw xlris::InvalidInput("give --config, --profile or both");
  nlohmann::json patch = nlohmann::json::object();
  if (o.seed) patch["seed"] = *o.seed;
  if (!o.codebook_path.empty()) patch["codebook_path"] = o.codebook_path;
  if (!patch.empty()) text = xlris::merge_json(text, patch.dump());
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field discrete-phase RIS codebooks, beam training and multiuser precoding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", xlris::library_version());

  Options o;
  std::map<CLI::App*, std::string> names;

  auto* codebook = app.add_subcommand("codebook", "Codebook operations");
  codebook->require_subcommand(1);
  auto* build = codebook->add_subcommand("build", "Design the multi-level codebook");
  names[build] = "codebook build";

  auto* train = app.add_subcommand("train", "Hierarchical and exhaustive beam training over seeded placements");
  names[train] = "train";
  auto* im = app.add_subcommand("im", "Fairness-adaptive interference management");
  names[im] = "im";
  auto* wmmse = app.add_subcommand("wmmse", "WMMSE sum-rate baseline");
  names[wmmse] = "wmmse";
  auto* hybrid = app.add_subcommand("hybrid", "Hybrid analog/digital factorisation of codebook precoders");
  names[hybrid] = "hybrid";
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep of IM against WMMSE");
  names[sweep] = "sweep";

  for (auto& [cmd, _] : names) add_common(cmd, o);
  for (auto* cmd : {train, hybrid}) {
    cmd->add_option("--codebook", o.codebook_path, "Reuse a saved codebook JSON instead of designing one");
  }

  CLI11_PARSE(app, argc, argv);

  std::string subcommand;
  for (auto& [cmd, name] : names) {
    if (cmd->parsed()) subcommand = name;
  }

  xlris::ExperimentConfig cfg;
  try {
    cfg = xlris::parse_config(resolve_config_text(o));
    xlris::require_blocks(cfg, subcommand);
  } catch (const std::exception& e) {
    std::cerr << "xlris: invalid configuration: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto report = xlris::run_experiment(subcommand, cfg, o.out_dir, o.quiet ? nullptr : &std::cerr);
    for (const auto& a : report.artifacts) std::cout << a.hash << "  " << a.name << '\n';
    std::cout << "manifest " << report.manifest.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "xlris: " << subcommand << " failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
