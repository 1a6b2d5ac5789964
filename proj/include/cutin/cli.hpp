#pragma once

// Command-line front end.
//
//   cutin run      --scenario FILE --algorithm {lloyd|proposed} [--seed N] [--trials N]
//                  [--duration S] [--out DIR] [--emit trajectories,metrics,summary]
//                  [--threads N] [--parallel-agents] [--quiet]
//   cutin replay   --manifest DIR/summary.json [--scenario FILE] --out DIR
//   cutin generate --scenario FILE --seed N --out FILE
//
// Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cutin/engine.hpp"
#include "cutin/export.hpp"
#include "cutin/scenario_io.hpp"

namespace cutin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunOptions {
  std::string scenario_path;
  Algorithm algorithm = Algorithm::Proposed;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::optional<double> duration;
  std::filesystem::path out_dir = ".";
  EmitSet emit{Emit::Metrics, Emit::Summary};
  EngineOptions engine;
  bool quiet = false;
};

namespace detail {

inline int execute(const Scenario& scenario, RunManifest manifest, const RunOptions& opts,
                   std::ostream& out, std::ostream& err) {
  EngineOptions engine = opts.engine;
  engine.record_trajectories = opts.emit.contains(Emit::Trajectories);

  const auto start = std::chrono::steady_clock::now();
  CampaignResult result;
  try {
    result = run_campaign(scenario, opts.algorithm, opts.trials, opts.seed, engine);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    export_outputs(result, manifest, opts.out_dir, opts.emit);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  const auto& s = result.summary;
  if (!opts.quiet) {
    out << "algorithm=" << to_string(opts.algorithm) << " trials=" << s.n_trials
        << " converged=" << s.n_converged << " fraction_converged=" << fixed9(s.fraction_converged)
        << " safe_sample_fraction=" << fixed9(s.safe_sample_fraction) << "\n";
  }
  if (s.n_failed > 0) {
    for (const auto& t : result.trials)
      if (t.failed) err << "trial seed " << t.seed << " failed: " << t.failure << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace detail

/// Runs a campaign and writes its outputs. Convergence failures are data;
/// only numerical failures and I/O errors produce a non-zero exit.
inline int cmd_run(const RunOptions& opts, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  Scenario scenario;
  try {
    scenario = parse_scenario_file(opts.scenario_path);
    if (opts.duration) {
      scenario.config.t_last = *opts.duration;
      scenario.validate();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (opts.trials == 0) {
    err << "error: --trials must be at least 1\n";
    return kExitUsage;
  }

  RunManifest manifest;
  manifest.scenario_path = opts.scenario_path;
  manifest.scenario = scenario;
  manifest.algorithm = opts.algorithm;
  manifest.base_seed = opts.seed;
  manifest.trials = opts.trials;
  manifest.duration_override = opts.duration;
  manifest.emit = opts.emit;
  manifest.engine = opts.engine;
  return detail::execute(scenario, std::move(manifest), opts, out, err);
}

/// Re-executes the run described by a manifest. When `scenario_path` is
/// given, its contents must match the scenario recorded in the manifest.
inline int cmd_replay(const std::filesystem::path& manifest_path,
                      const std::optional<std::string>& scenario_path,
                      const std::filesystem::path& out_dir, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  RunManifest manifest;
  try {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest '" + manifest_path.string() + "'");
    const auto doc = nlohmann::json::parse(in);
    manifest = manifest_from_json(doc.contains("manifest") ? doc.at("manifest") : doc);
    if (scenario_path) {
      Scenario s = parse_scenario_file(*scenario_path);
      if (manifest.duration_override) s.config.t_last = *manifest.duration_override;
      if (!(s == manifest.scenario))
        throw std::invalid_argument("scenario file does not match the manifest");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  RunOptions opts;
  opts.scenario_path = manifest.scenario_path;
  opts.algorithm = manifest.algorithm;
  opts.seed = manifest.base_seed;
  opts.trials = manifest.trials;
  opts.duration = manifest.duration_override;
  opts.out_dir = out_dir;
  opts.emit = manifest.emit;
  opts.engine = manifest.engine;
  opts.quiet = true;
  const Scenario scenario = manifest.scenario;
  return detail::execute(scenario, std::move(manifest), opts, out, err);
}

/// Draws the agents and targets a generated scenario would use for `seed`
/// and writes them as an explicit scenario file.
inline int cmd_generate(const std::string& scenario_path, std::uint64_t seed,
                        const std::filesystem::path& out_path, std::ostream& err = std::cerr) {
  Scenario s;
  try {
    s = materialize(parse_scenario_file(scenario_path), seed);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    write_file(out_path, serialize_scenario(s));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Distributed cut-in coverage control simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kSoftwareVersion));

  RunOptions run;
  std::string algorithm = "proposed";
  std::vector<std::string> emit;
  std::optional<double> duration;
  auto* run_cmd = app.add_subcommand("run", "Run a campaign of trials");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario file")->required();
  run_cmd->add_option("--algorithm", algorithm, "lloyd or proposed")
      ->check(CLI::IsMember({"lloyd", "proposed"}));
  run_cmd->add_option("--seed", run.seed, "Base seed; trial k uses seed + k");
  run_cmd->add_option("--trials", run.trials, "Number of trials")->check(CLI::PositiveNumber);
  run_cmd->add_option("--duration", duration, "Override t_L in seconds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--emit", emit, "Outputs: trajectories, metrics, summary")
      ->delimiter(',')
      ->check(CLI::IsMember({"trajectories", "metrics", "summary"}));
  run_cmd->add_option("--threads", run.engine.trial_threads, "Concurrent trials")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--parallel-agents", run.engine.parallel_agents,
                    "Evaluate agents of a round in parallel");
  run_cmd->add_flag("--quiet", run.quiet, "Suppress the summary line");

  std::string manifest_path;
  std::optional<std::string> replay_scenario;
  std::string replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run from a run manifest");
  replay_cmd->add_option("--manifest", manifest_path, "summary.json of a previous run")->required();
  replay_cmd->add_option("--scenario", replay_scenario, "Scenario file to check against");
  replay_cmd->add_option("--out", replay_out, "Output directory")->required();

  std::string gen_scenario;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write the explicit scenario for one seed");
  gen_cmd->add_option("--scenario", gen_scenario, "Scenario file with a generator")->required();
  gen_cmd->add_option("--seed", gen_seed, "Trial seed")->required();
  gen_cmd->add_option("--out", gen_out, "Output scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (run_cmd->parsed()) {
    run.algorithm = *parse_algorithm(algorithm);
    run.duration = duration;
    if (!emit.empty()) {
      run.emit.clear();
      for (const auto& e : emit) run.emit.insert(*parse_emit(e));
    }
    return cmd_run(run, out, err);
  }
  if (replay_cmd->parsed()) return cmd_replay(manifest_path, replay_scenario, replay_out, out, err);
  return cmd_generate(gen_scenario, gen_seed, gen_out, err);
}

}  // namespace cutin::cli
