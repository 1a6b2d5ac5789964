#pragma once

// Plot-ready outputs: per-trial metrics and trajectory CSVs plus a JSON
// summary that embeds the run manifest.
//
// CSV columns (schema cutin-csv/1):
//   metrics_<algorithm>_seed<seed>.csv     t,p_cov,p_cov_lower,min_pairwise_dist
//   trajectory_<algorithm>_seed<seed>.csv  t,agent_id,x,y,ref_target,tier
// Numbers are fixed-point with nine decimals. agent_id and ref_target are
// 1-based; ref_target is empty when the agent holds or at t = 0.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cutin/engine.hpp"
#include "cutin/scenario_io.hpp"

namespace cutin {

inline constexpr std::string_view kCsvSchema = "cutin-csv/1";
inline constexpr std::string_view kSoftwareVersion = "1.0.0";

enum class Emit : unsigned char { Trajectories, Metrics, Summary };

constexpr std::string_view to_string(Emit e) {
  switch (e) {
    case Emit::Trajectories: return "trajectories";
    case Emit::Metrics: return "metrics";
    case Emit::Summary: break;
  }
  return "summary";
}

inline std::optional<Emit> parse_emit(std::string_view s) {
  if (s == "trajectories") return Emit::Trajectories;
  if (s == "metrics") return Emit::Metrics;
  if (s == "summary") return Emit::Summary;
  return std::nullopt;
}

using EmitSet = std::set<Emit>;

inline std::string fixed9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

inline std::string metrics_csv(const TrialResult& trial) {
  std::string out = "t,p_cov,p_cov_lower,min_pairwise_dist\n";
  for (const auto& m : trial.metrics) {
    out += fixed9(m.t) + ',' + fixed9(m.p_cov) + ',' + fixed9(m.p_cov_lower) + ',' +
           fixed9(m.min_pairwise_distance) + '\n';
  }
  return out;
}

inline std::string trajectory_csv(const TrialResult& trial) {
  std::string out = "t,agent_id,x,y,ref_target,tier\n";
  for (const auto& f : trial.trajectory) {
    const std::string t = fixed9(f.t);
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      const auto& a = f.agents[i];
      out += t;
      out += ',' + std::to_string(i + 1) + ',' + fixed9(a.pos.x) + ',' + fixed9(a.pos.y) + ',';
      if (a.choice && a.choice->target) out += std::to_string(*a.choice->target + 1);
      out += ',';
      out += a.choice ? to_string(a.choice->tier) : std::string_view("init");
      out += '\n';
    }
  }
  return out;
}

inline std::string trial_file_name(std::string_view kind, const TrialResult& trial) {
  return std::string(kind) + "_" + std::string(to_string(trial.algorithm)) + "_seed" +
         std::to_string(trial.seed) + ".csv";
}

/// Everything needed to reproduce a run bit-exactly, plus what it produced.
struct RunManifest {
  std::string software = "cutin";
  std::string version = std::string(kSoftwareVersion);
  std::string csv_schema = std::string(kCsvSchema);
  std::string scenario_path;
  Scenario scenario;  // after any duration override
  Algorithm algorithm = Algorithm::Proposed;
  std::uint64_t base_seed = 0;
  std::size_t trials = 1;
  std::optional<double> duration_override;
  EmitSet emit;
  EngineOptions engine;
  double wall_clock_seconds = 0.0;
};

namespace detail {

inline nlohmann::json config_json(const WorldConfig& c) {
  return {
      {"region",
       {{"x_min", c.region.x_min}, {"x_max", c.region.x_max}, {"y_min", c.region.y_min},
        {"y_max", c.region.y_max}}},
      {"n", c.n_agents},
      {"n_t", c.n_targets},
      {"dt", c.dt},
      {"v_max", c.v_max},
      {"k_gain", c.k_gain},
      {"footprint", {{"width", c.footprint.width}, {"height", c.footprint.height}}},
      {"d_c", c.d_c},
      {"d_k", c.d_k},
      {"K_d", c.K_d},
      {"K_s", c.K_s},
      {"collision_distance", c.collision_distance},
      {"t_L", c.t_last},
  };
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// JSON has no infinity; a lone agent's minimum distance is written as null.
inline nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json emit = nlohmann::json::array();
  for (Emit e : m.emit) emit.push_back(std::string(to_string(e)));
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t k = 0; k < m.trials; ++k) seeds.push_back(m.base_seed + k);
  return {
      {"software", m.software},
      {"version", m.version},
      {"csv_schema", m.csv_schema},
      {"scenario_path", m.scenario_path},
      {"scenario", serialize_scenario(m.scenario)},
      {"config", detail::config_json(m.scenario.config)},
      {"algorithm", std::string(to_string(m.algorithm))},
      {"base_seed", m.base_seed},
      {"trials", m.trials},
      {"seeds", seeds},
      {"duration_override", detail::optional_json(m.duration_override)},
      {"emit", emit},
      {"engine",
       {{"parallel_agents", m.engine.parallel_agents}, {"trial_threads", m.engine.trial_threads}}},
      {"wall_clock_seconds", m.wall_clock_seconds},
  };
}

/// Reads back the fields of a manifest that determine the run's outputs.
inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.software = j.at("software").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.csv_schema = j.at("csv_schema").get<std::string>();
    m.scenario_path = j.at("scenario_path").get<std::string>();
    m.scenario = parse_scenario(j.at("scenario").get<std::string>());
    const auto alg = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!alg) throw std::invalid_argument("manifest: unknown algorithm");
    m.algorithm = *alg;
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.trials = j.at("trials").get<std::size_t>();
    if (!j.at("duration_override").is_null())
      m.duration_override = j.at("duration_override").get<double>();
    for (const auto& e : j.at("emit")) {
      const auto parsed = parse_emit(e.get<std::string>());
      if (!parsed) throw std::invalid_argument("manifest: unknown emit kind");
      m.emit.insert(*parsed);
    }
    m.engine.parallel_agents = j.at("engine").at("parallel_agents").get<bool>();
    m.engine.trial_threads = j.at("engine").at("trial_threads").get<unsigned>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  }
  return m;
}

inline nlohmann::json summary_json(const CampaignResult& result, const RunManifest& manifest) {
  const auto& s = result.summary;
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t k = 0; k < result.trials.size(); ++k) {
    const auto& t = result.trials[k];
    nlohmann::json phases = nlohmann::json::array();
    for (const auto& p : t.phases)
      phases.push_back({{"start_t", p.start_t},
                        {"end_t", p.end_t},
                        {"converged", p.converged},
                        {"convergence_time", detail::optional_json(p.convergence_time)}});
    trials.push_back({
        {"seed", t.seed},
        {"converged", t.converged},
        {"convergence_time", detail::optional_json(t.convergence_time)},
        {"final_p_cov", t.metrics.empty() ? 0.0 : t.metrics.back().p_cov},
        {"global_min_distance", detail::finite_or_null(t.global_min_distance)},
        {"safe_sample_fraction", s.safe_sample_fractions[k]},
        {"phases", phases},
        {"failed", t.failed},
        {"failure", t.failure},
    });
  }
  nlohmann::json times = nlohmann::json::array();
  for (const auto& ct : s.convergence_times) times.push_back(detail::optional_json(ct));
  return {
      {"manifest", manifest_json(manifest)},
      {"summary",
       {{"n_trials", s.n_trials},
        {"n_converged", s.n_converged},
        {"n_failed", s.n_failed},
        {"fraction_converged", s.fraction_converged},
        {"convergence_times", times},
        {"collision_distance", s.collision_distance},
        {"safe_sample_fraction", s.safe_sample_fraction}}},
      {"trials", trials},
  };
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Writes the requested outputs into `dir`, creating it if needed. Returns
/// the paths written. Throws std::runtime_error on I/O failure.
inline std::vector<std::filesystem::path> export_outputs(const CampaignResult& result,
                                                         const RunManifest& manifest,
                                                         const std::filesystem::path& dir,
                                                         const EmitSet& emit) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const auto& trial : result.trials) {
    if (emit.contains(Emit::Metrics)) {
      written.push_back(dir / trial_file_name("metrics", trial));
      write_file(written.back(), metrics_csv(trial));
    }
    if (emit.contains(Emit::Trajectories)) {
      written.push_back(dir / trial_file_name("trajectory", trial));
      write_file(written.back(), trajectory_csv(trial));
    }
  }
  if (emit.contains(Emit::Summary)) {
    written.push_back(dir / "summary.json");
    write_file(written.back(), summary_json(result, manifest).dump(2) + "\n");
  }
  return written;
}

}  // namespace cutin
