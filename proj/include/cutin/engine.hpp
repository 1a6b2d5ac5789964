#pragma once

// Synchronous round loop, scenario generation, trials and campaigns.
//
// A round runs every agent against the same position snapshot: neighbour
// discovery, assignment, coverage reports, memory update, reference
// selection and control. New positions are committed only after every agent
// has computed its step, so evaluation order never changes the result.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <execution>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cutin/assignment.hpp"
#include "cutin/core.hpp"
#include "cutin/motion.hpp"
#include "cutin/protocol.hpp"

namespace cutin {

enum class Algorithm : unsigned char { Lloyd, Proposed };

constexpr std::string_view to_string(Algorithm a) {
  return a == Algorithm::Lloyd ? "lloyd" : "proposed";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "lloyd") return Algorithm::Lloyd;
  if (s == "proposed") return Algorithm::Proposed;
  return std::nullopt;
}

/// When a phase ends. FixedDuration phases last t_L. OnFullCoverage phases
/// end once full coverage has held for `settle` seconds, or at t_L.
struct PhaseTrigger {
  enum class Kind : unsigned char { FixedDuration, OnFullCoverage };
  Kind kind = Kind::FixedDuration;
  double settle = 0.0;

  static PhaseTrigger fixed_duration() { return {Kind::FixedDuration, 0.0}; }
  static PhaseTrigger on_full_coverage(double settle) { return {Kind::OnFullCoverage, settle}; }
  bool operator==(const PhaseTrigger&) const = default;
};

/// Random target layout on a cols x rows grid of cell centres, with agents
/// dropped uniformly in the region.
struct GridGenerator {
  std::size_t cols = 20;
  std::size_t rows = 20;
  bool operator==(const GridGenerator&) const = default;
};

struct Scenario {
  WorldConfig config;
  std::vector<Vec2> initial_agent_positions;
  std::vector<TargetSet> target_phases;
  PhaseTrigger trigger;
  // When set, agents and targets are drawn per trial seed instead of being
  // taken from the fields above.
  std::optional<GridGenerator> generator;

  bool operator==(const Scenario&) const = default;

  void validate() const {
    config.validate();
    if (generator) {
      if (generator->cols == 0 || generator->rows == 0)
        throw ValidationError("generator", "grid must have at least one cell");
      if (config.n_targets > generator->cols * generator->rows)
        throw ValidationError("n_t", "exceeds the number of grid cells");
    } else {
      if (initial_agent_positions.size() != config.n_agents)
        throw ValidationError("agents", "expected " + std::to_string(config.n_agents) +
                                            " positions, got " +
                                            std::to_string(initial_agent_positions.size()));
      for (std::size_t i = 0; i < initial_agent_positions.size(); ++i)
        if (!initial_agent_positions[i].finite() ||
            !config.region.contains(initial_agent_positions[i]))
          throw ValidationError("agents", "agent " + std::to_string(i + 1) + " lies outside the region");
      if (target_phases.empty()) throw ValidationError("phases", "at least one phase is required");
      for (std::size_t p = 0; p < target_phases.size(); ++p) {
        const std::string field = "phases[" + std::to_string(p + 1) + "]";
        if (target_phases[p].size() != config.n_targets)
          throw ValidationError(field, "expected " + std::to_string(config.n_targets) + " targets");
        target_phases[p].validate(config.region, field);
      }
    }
    if (trigger.kind == PhaseTrigger::Kind::OnFullCoverage &&
        !(std::isfinite(trigger.settle) && trigger.settle >= 0.0))
      throw ValidationError("phase_trigger", "settle must be >= 0");
  }
};

struct MetricsRecord {
  double t = 0.0;
  double p_cov = 0.0;
  double p_cov_lower = 0.0;
  double min_pairwise_distance = 0.0;  // +inf with fewer than two agents
  bool operator==(const MetricsRecord&) const = default;
};

struct AgentSample {
  Vec2 pos{};
  std::optional<ReferenceChoice> choice;  // absent for the initial frame
  bool operator==(const AgentSample&) const = default;
};

struct TrajectoryFrame {
  double t = 0.0;
  std::vector<AgentSample> agents;
  bool operator==(const TrajectoryFrame&) const = default;
};

struct PhaseResult {
  std::size_t first_record = 0;  // index into TrialResult::metrics
  std::size_t last_record = 0;   // inclusive
  double start_t = 0.0;
  double end_t = 0.0;
  bool converged = false;
  std::optional<double> convergence_time;
  bool operator==(const PhaseResult&) const = default;
};

struct TrialResult {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Proposed;
  std::vector<MetricsRecord> metrics;
  std::vector<TrajectoryFrame> trajectory;  // empty unless recording was requested
  std::vector<PhaseResult> phases;
  std::vector<TargetSet> target_phases;
  std::vector<Vec2> final_positions;
  bool converged = false;
  std::optional<double> convergence_time;
  double global_min_distance = std::numeric_limits<double>::infinity();
  bool failed = false;
  std::string failure;

  bool operator==(const TrialResult&) const = default;
};

struct EngineOptions {
  bool record_trajectories = false;
  bool parallel_agents = false;  // per-agent stages of a round
  unsigned trial_threads = 1;    // concurrent trials in a campaign
};

/// What a single agent may legally read during a round: the committed
/// positions of every agent in range and the reports those agents sent.
struct RoundSnapshot {
  double t = 0.0;
  std::span<const Vec2> positions;
  std::vector<NeighborSet> neighbors;
  std::vector<AssignedTargets> assigned;
  std::vector<CoverageReport> reports;

  /// Reports from agents in range of i, i's own included.
  auto inbox(AgentId i) const {
    return neighbors[i].members |
           std::views::transform([this](AgentId j) -> const CoverageReport& { return reports[j]; });
  }
};

inline double min_pairwise_distance(std::span<const Vec2> positions) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      best = std::min(best, distance(positions[i], positions[j]));
  return best;
}

inline MetricsRecord measure(double t, std::span<const Vec2> positions, const TargetSet& targets,
                             const WorldConfig& config) {
  const auto neighbors = neighbor_sets(positions, config.d_c);
  const auto assigned = assign_all(positions, targets, neighbors);
  const auto rates = global_coverage(positions, targets, config.footprint, assigned);
  return {t, rates.p_cov, rates.p_cov_lower, min_pairwise_distance(positions)};
}

inline std::vector<Vec2> positions_of(std::span<const AgentState> agents) {
  std::vector<Vec2> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.pos);
  return out;
}

struct RoundOutput {
  std::vector<AgentState> agents;
  std::vector<ReferenceChoice> choices;
  MetricsRecord metrics;  // measured on the committed positions at t
};

/// Executes one synchronous round and returns the committed state at `t`.
inline RoundOutput run_round(std::span<const AgentState> agents, const TargetSet& targets,
                             const WorldConfig& config, Algorithm algorithm, double t,
                             bool parallel_agents = false) {
  const std::size_t n = agents.size();
  const std::vector<Vec2> positions = positions_of(agents);

  RoundSnapshot snap;
  snap.t = t;
  snap.positions = positions;
  snap.neighbors = neighbor_sets(positions, config.d_c);
  snap.assigned = assign_all(positions, targets, snap.neighbors);
  const CoverageIndex index(positions, targets, config.footprint);
  snap.reports.reserve(n);
  for (AgentId j = 0; j < n; ++j)
    snap.reports.push_back(evaluate_coverage(snap.assigned[j], snap.neighbors[j], index));

  RoundOutput out;
  out.agents.assign(agents.begin(), agents.end());
  out.choices.resize(n);

  auto step_agent = [&](AgentId i) {
    AgentState& next = out.agents[i];
    const Vec2 x = positions[i];
    const auto& assigned = snap.assigned[i];
    ReferenceChoice choice;
    if (algorithm == Algorithm::Proposed) {
      const auto inbox = snap.inbox(i);
      next.memory = update_memory(std::move(next.memory), inbox);
      choice = select_reference_proposed(assigned, uncovered_sets(next.memory), targets, x);
    } else {
      choice = select_reference_lloyd(assigned, targets, x);
    }
    next.reference = choice.target;
    std::optional<Vec2> ref;
    if (choice.target) ref = targets[*choice.target];
    const Vec2 u = attraction(x, ref, config.k_gain);
    const Vec2 du = repulsion(i, positions, !assigned.empty(), config.K_d, config.K_s, config.d_k);
    next.pos = integrate(x, u, du, config.dt, config.v_max, config.region);
    out.choices[i] = choice;
  };

  if (parallel_agents) {
    std::vector<AgentId> ids(n);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    std::for_each(std::execution::par, ids.begin(), ids.end(), step_agent);
  } else {
    for (AgentId i = 0; i < n; ++i) step_agent(i);
  }

  out.metrics = measure(t, positions_of(out.agents), targets, config);
  return out;
}

// ---------------------------------------------------------------------------
// Scenario generation

inline std::vector<Vec2> grid_cell_centres(const Region& region, const GridGenerator& grid) {
  const double cw = region.width() / static_cast<double>(grid.cols);
  const double ch = region.height() / static_cast<double>(grid.rows);
  std::vector<Vec2> out;
  out.reserve(grid.cols * grid.rows);
  for (std::size_t r = 0; r < grid.rows; ++r)
    for (std::size_t c = 0; c < grid.cols; ++c)
      out.push_back({region.x_min + (static_cast<double>(c) + 0.5) * cw,
                     region.y_min + (static_cast<double>(r) + 0.5) * ch});
  return out;
}

/// Draws targets on distinct grid cell centres and agents uniformly in the
/// region, at least collision_distance apart. Fully determined by `seed`.
inline Scenario generate_random_scenario(const WorldConfig& config, std::uint64_t seed,
                                         GridGenerator grid = {},
                                         PhaseTrigger trigger = PhaseTrigger::fixed_duration()) {
  config.validate();
  const std::size_t cells = grid.cols * grid.rows;
  if (config.n_targets > cells)
    throw ValidationError("n_t", "cannot place " + std::to_string(config.n_targets) +
                                     " targets on " + std::to_string(cells) + " grid cells");

  std::mt19937_64 rng(seed);
  auto centres = grid_cell_centres(config.region, grid);
  // Partial Fisher-Yates: the first n_targets entries are a uniform sample.
  for (std::size_t k = 0; k < config.n_targets; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, cells - 1);
    std::swap(centres[k], centres[pick(rng)]);
  }
  TargetSet targets{{centres.begin(), centres.begin() + static_cast<std::ptrdiff_t>(config.n_targets)}};

  std::uniform_real_distribution<double> ux(config.region.x_min, config.region.x_max);
  std::uniform_real_distribution<double> uy(config.region.y_min, config.region.y_max);
  std::vector<Vec2> agents;
  agents.reserve(config.n_agents);
  constexpr std::size_t kMaxAttempts = 1'000'000;
  std::size_t attempts = 0;
  while (agents.size() < config.n_agents) {
    if (++attempts > kMaxAttempts)
      throw ValidationError("n", "cannot place agents at least collision_distance apart");
    const Vec2 p{ux(rng), uy(rng)};
    const bool clear = std::all_of(agents.begin(), agents.end(), [&](Vec2 q) {
      return distance(p, q) >= config.collision_distance;
    });
    if (clear) agents.push_back(p);
  }

  Scenario s;
  s.config = config;
  s.initial_agent_positions = std::move(agents);
  s.target_phases = {std::move(targets)};
  s.trigger = trigger;
  return s;
}

/// Scenario whose target pattern changes in order. Memory is reset to
/// all-null at every phase switch since target ids are re-used.
inline Scenario make_switching_scenario(const WorldConfig& config,
                                        std::vector<Vec2> initial_agent_positions,
                                        std::vector<TargetSet> phase_patterns,
                                        PhaseTrigger trigger = PhaseTrigger::on_full_coverage(2.0)) {
  Scenario s;
  s.config = config;
  s.initial_agent_positions = std::move(initial_agent_positions);
  s.target_phases = std::move(phase_patterns);
  s.trigger = trigger;
  s.validate();
  return s;
}

inline Scenario materialize(const Scenario& scenario, std::uint64_t seed) {
  if (!scenario.generator) return scenario;
  return generate_random_scenario(scenario.config, seed, *scenario.generator, scenario.trigger);
}

// ---------------------------------------------------------------------------
// Trials

namespace detail {

inline std::size_t steps_for(double seconds, double dt) {
  return static_cast<std::size_t>(std::llround(seconds / dt));
}

inline void finish_phase(PhaseResult& phase, std::span<const MetricsRecord> metrics) {
  phase.converged = metrics[phase.last_record].p_cov == 1.0;
  if (!phase.converged) return;
  std::size_t k = phase.last_record;
  while (k > phase.first_record && metrics[k - 1].p_cov == 1.0) --k;
  phase.convergence_time = metrics[k].t;
}

inline TrajectoryFrame frame(double t, std::span<const AgentState> agents,
                             const std::vector<ReferenceChoice>* choices) {
  TrajectoryFrame f{t, {}};
  f.agents.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i)
    f.agents.push_back({agents[i].pos, choices ? std::optional((*choices)[i]) : std::nullopt});
  return f;
}

}  // namespace detail

/// Runs every phase of the scenario. Time is global across phases:
/// t = k * dt for the k-th round of the trial.
inline TrialResult run_trial(const Scenario& scenario, Algorithm algorithm, std::uint64_t seed,
                             const EngineOptions& options = {}) {
  const Scenario s = materialize(scenario, seed);
  s.validate();
  const WorldConfig& cfg = s.config;

  TrialResult result;
  result.seed = seed;
  result.algorithm = algorithm;
  result.target_phases = s.target_phases;

  std::vector<AgentState> agents;
  agents.reserve(cfg.n_agents);
  for (AgentId i = 0; i < cfg.n_agents; ++i)
    agents.emplace_back(i, s.initial_agent_positions[i], cfg.n_targets);

  const std::size_t horizon = detail::steps_for(cfg.t_last, cfg.dt);
  const std::size_t settle_steps = detail::steps_for(s.trigger.settle, cfg.dt);
  std::size_t step = 0;

  result.metrics.push_back(measure(0.0, positions_of(agents), s.target_phases.front(), cfg));
  if (options.record_trajectories) result.trajectory.push_back(detail::frame(0.0, agents, nullptr));
  result.global_min_distance = result.metrics.back().min_pairwise_distance;

  for (std::size_t p = 0; p < s.target_phases.size(); ++p) {
    const TargetSet& targets = s.target_phases[p];
    for (auto& a : agents) a.reset_memory();

    PhaseResult phase;
    phase.first_record = p == 0 ? 0 : result.metrics.size();
    phase.start_t = static_cast<double>(step) * cfg.dt;
    std::size_t full_run = 0;
    for (std::size_t k = 0; k < horizon; ++k) {
      ++step;
      const double t = static_cast<double>(step) * cfg.dt;
      RoundOutput round = run_round(agents, targets, cfg, algorithm, t, options.parallel_agents);
      agents = std::move(round.agents);

      for (const auto& a : agents) {
        if (!a.pos.finite()) {
          result.failed = true;
          result.failure = "non-finite position for agent " + std::to_string(a.id + 1) +
                           " at t=" + std::to_string(t) + " (phase " + std::to_string(p + 1) + ")";
          break;
        }
      }
      result.metrics.push_back(round.metrics);
      result.global_min_distance =
          std::min(result.global_min_distance, round.metrics.min_pairwise_distance);
      if (options.record_trajectories)
        result.trajectory.push_back(detail::frame(t, agents, &round.choices));
      if (result.failed) break;

      full_run = round.metrics.p_cov == 1.0 ? full_run + 1 : 0;
      if (s.trigger.kind == PhaseTrigger::Kind::OnFullCoverage && full_run > 0 &&
          full_run >= settle_steps)
        break;
    }
    phase.last_record = result.metrics.size() - 1;
    phase.end_t = static_cast<double>(step) * cfg.dt;
    detail::finish_phase(phase, result.metrics);
    result.phases.push_back(phase);
    if (result.failed) break;
  }

  result.final_positions = positions_of(agents);
  result.converged = !result.failed &&
                     std::all_of(result.phases.begin(), result.phases.end(),
                                 [](const PhaseResult& ph) { return ph.converged; }) &&
                     result.phases.size() == s.target_phases.size();
  if (result.converged) result.convergence_time = result.phases.back().convergence_time;
  return result;
}

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignSummary {
  std::size_t n_trials = 0;
  std::size_t n_converged = 0;
  std::size_t n_failed = 0;
  double fraction_converged = 0.0;
  std::vector<std::optional<double>> convergence_times;  // per trial
  std::vector<double> global_min_distances;              // per trial
  std::vector<double> safe_sample_fractions;             // per trial
  double safe_sample_fraction = 0.0;                     // over all (trial, step) samples
  double collision_distance = 0.0;
};

struct CampaignResult {
  std::vector<TrialResult> trials;
  CampaignSummary summary;
};

inline CampaignSummary summarize(std::span<const TrialResult> trials, double collision_distance) {
  CampaignSummary s;
  s.n_trials = trials.size();
  s.collision_distance = collision_distance;
  std::size_t safe = 0, samples = 0;
  for (const auto& t : trials) {
    s.n_converged += t.converged;
    s.n_failed += t.failed;
    s.convergence_times.push_back(t.convergence_time);
    s.global_min_distances.push_back(t.global_min_distance);
    std::size_t trial_safe = 0;
    for (const auto& m : t.metrics) trial_safe += m.min_pairwise_distance >= collision_distance;
    s.safe_sample_fractions.push_back(
        t.metrics.empty() ? 1.0
                          : static_cast<double>(trial_safe) / static_cast<double>(t.metrics.size()));
    safe += trial_safe;
    samples += t.metrics.size();
  }
  s.fraction_converged =
      s.n_trials ? static_cast<double>(s.n_converged) / static_cast<double>(s.n_trials) : 0.0;
  s.safe_sample_fraction = samples ? static_cast<double>(safe) / static_cast<double>(samples) : 1.0;
  return s;
}

/// Runs trials with seeds base_seed .. base_seed + n_trials - 1. Results are
/// stored by trial index, so the thread count never changes the output.
inline CampaignResult run_campaign(const Scenario& scenario, Algorithm algorithm,
                                   std::size_t n_trials, std::uint64_t base_seed,
                                   const EngineOptions& options = {}) {
  if (n_trials == 0) throw std::invalid_argument("run_campaign: n_trials must be >= 1");
  scenario.validate();
  CampaignResult out;
  out.trials.resize(n_trials);
  const unsigned threads = std::max(1u, std::min<unsigned>(options.trial_threads,
                                                           static_cast<unsigned>(n_trials)));
  auto worker = [&](unsigned w) {
    for (std::size_t k = w; k < n_trials; k += threads) {
      try {
        out.trials[k] = run_trial(scenario, algorithm, base_seed + k, options);
      } catch (const std::exception& e) {
        out.trials[k].seed = base_seed + k;
        out.trials[k].algorithm = algorithm;
        out.trials[k].failed = true;
        out.trials[k].failure = e.what();
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  out.summary = summarize(out.trials, scenario.config.collision_distance);
  return out;
}

}  // namespace cutin
