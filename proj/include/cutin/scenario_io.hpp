#pragma once

// Scenario files: a small YAML document with a `world` section holding the
// physical parameters, a phase trigger, and either a random-grid generator
// or explicit agent positions and target phases.
//
//   format: cutin-scenario/1
//   world:
//     region: {x_min: -10, x_max: 10, y_min: -10, y_max: 10}
//     n: 100
//     n_t: 100
//     dt: 0.02
//     ...
//   phase_trigger: {kind: fixed_duration}
//   generator: {kind: random_grid, cols: 20, rows: 20}
//
// See docs/scenario-format.md for the full grammar.

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <yaml-cpp/yaml.h>

#include "cutin/engine.hpp"

namespace cutin {

inline constexpr std::string_view kScenarioFormat = "cutin-scenario/1";

/// Malformed or invalid scenario file. `line()` is 1-based, 0 when unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, int line, std::string message, std::string source = {})
      : std::runtime_error(format(source, field, line, message)),
        field_(std::move(field)),
        message_(std::move(message)),
        line_(line) {}

  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  int line() const { return line_; }

  ScenarioError with_source(const std::string& source) const {
    return {field_, line_, message_, source};
  }

 private:
  static std::string format(const std::string& source, const std::string& field, int line,
                            const std::string& message) {
    std::string out;
    if (!source.empty()) out += source + ": ";
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  std::string field_;
  std::string message_;
  int line_ = 0;
};

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf, end};
}

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

inline void reject_unknown_keys(const YAML::Node& map, const std::string& section,
                                std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ScenarioError(section.empty() ? key : section + "." + key, line_of(kv.first),
                          "unknown key");
  }
}

inline YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& path,
                          int parent_line) {
  const YAML::Node n = map[key];
  if (!n) throw ScenarioError(path, parent_line, "missing required key");
  return n;
}

inline double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ScenarioError(path, line_of(n), "expected a number");
  const auto& s = n.Scalar();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ScenarioError(path, line_of(n), "expected a number, got '" + s + "'");
  return v;
}

inline std::size_t as_count(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ScenarioError(path, line_of(n), "expected a non-negative integer");
  const auto& s = n.Scalar();
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ScenarioError(path, line_of(n), "expected a non-negative integer, got '" + s + "'");
  return v;
}

inline Vec2 as_point(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 2)
    throw ScenarioError(path, line_of(n), "expected a point [x, y]");
  return {as_double(n[0], path), as_double(n[1], path)};
}

inline std::vector<Vec2> as_points(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) throw ScenarioError(path, line_of(n), "expected a list of points");
  std::vector<Vec2> out;
  out.reserve(n.size());
  for (std::size_t k = 0; k < n.size(); ++k)
    out.push_back(as_point(n[k], path + "[" + std::to_string(k + 1) + "]"));
  return out;
}

inline WorldConfig parse_world(const YAML::Node& w) {
  if (!w.IsMap()) throw ScenarioError("world", line_of(w), "expected a mapping");
  reject_unknown_keys(w, "world",
                      {"region", "n", "n_t", "dt", "v_max", "k_gain", "footprint", "d_c", "d_k",
                       "K_d", "K_s", "collision_distance", "t_L"});
  const int wl = line_of(w);
  WorldConfig c;
  const auto region = require(w, "region", "world.region", wl);
  if (!region.IsMap()) throw ScenarioError("world.region", line_of(region), "expected a mapping");
  reject_unknown_keys(region, "world.region", {"x_min", "x_max", "y_min", "y_max"});
  const int rl = line_of(region);
  c.region.x_min = as_double(require(region, "x_min", "world.region.x_min", rl), "world.region.x_min");
  c.region.x_max = as_double(require(region, "x_max", "world.region.x_max", rl), "world.region.x_max");
  c.region.y_min = as_double(require(region, "y_min", "world.region.y_min", rl), "world.region.y_min");
  c.region.y_max = as_double(require(region, "y_max", "world.region.y_max", rl), "world.region.y_max");

  c.n_agents = as_count(require(w, "n", "world.n", wl), "world.n");
  c.n_targets = as_count(require(w, "n_t", "world.n_t", wl), "world.n_t");
  auto num = [&](const char* key, double& dst) {
    const std::string path = std::string("world.") + key;
    dst = as_double(require(w, key, path, wl), path);
  };
  num("dt", c.dt);
  num("v_max", c.v_max);
  // The proportional gain defaults to the speed limit.
  c.k_gain = w["k_gain"] ? as_double(w["k_gain"], "world.k_gain") : c.v_max;
  const auto fp = require(w, "footprint", "world.footprint", wl);
  if (!fp.IsMap()) throw ScenarioError("world.footprint", line_of(fp), "expected a mapping");
  reject_unknown_keys(fp, "world.footprint", {"width", "height"});
  c.footprint.width = as_double(require(fp, "width", "world.footprint.width", line_of(fp)),
                                "world.footprint.width");
  c.footprint.height = as_double(require(fp, "height", "world.footprint.height", line_of(fp)),
                                 "world.footprint.height");
  num("d_c", c.d_c);
  num("d_k", c.d_k);
  num("K_d", c.K_d);
  num("K_s", c.K_s);
  num("collision_distance", c.collision_distance);
  num("t_L", c.t_last);
  return c;
}

// Maps a ValidationError field name back to the key path used in the file.
inline std::string file_path_of(const std::string& field) {
  static const std::set<std::string> world_keys = {
      "region", "n", "n_t", "dt", "v_max", "k_gain", "footprint", "d_c", "d_k",
      "K_d", "K_s", "collision_distance", "t_L"};
  if (world_keys.contains(field)) return "world." + field;
  return field;
}

inline void parse_body(const YAML::Node& root, Scenario& s) {
  const int top = line_of(root);
  s.config = parse_world(require(root, "world", "world", top));
  if (const auto trig = root["phase_trigger"]) {
    if (!trig.IsMap()) throw ScenarioError("phase_trigger", line_of(trig), "expected a mapping");
    reject_unknown_keys(trig, "phase_trigger", {"kind", "settle"});
    const auto kind = require(trig, "kind", "phase_trigger.kind", line_of(trig));
    const auto k = kind.as<std::string>();
    if (k == "fixed_duration") {
      s.trigger = PhaseTrigger::fixed_duration();
    } else if (k == "on_full_coverage") {
      const auto settle = require(trig, "settle", "phase_trigger.settle", line_of(trig));
      s.trigger = PhaseTrigger::on_full_coverage(as_double(settle, "phase_trigger.settle"));
    } else {
      throw ScenarioError("phase_trigger.kind", line_of(kind), "unknown trigger '" + k + "'");
    }
  }

  const auto gen = root["generator"];
  const auto agents = root["agents"];
  const auto phases = root["phases"];
  if (gen) {
    if (agents || phases)
      throw ScenarioError("generator", line_of(gen),
                          "a generated scenario cannot also list agents or phases");
    if (!gen.IsMap()) throw ScenarioError("generator", line_of(gen), "expected a mapping");
    reject_unknown_keys(gen, "generator", {"kind", "cols", "rows"});
    const auto kind = require(gen, "kind", "generator.kind", line_of(gen));
    if (kind.as<std::string>() != "random_grid")
      throw ScenarioError("generator.kind", line_of(kind),
                          "unknown generator '" + kind.as<std::string>() + "'");
    GridGenerator g;
    if (gen["cols"]) g.cols = as_count(gen["cols"], "generator.cols");
    if (gen["rows"]) g.rows = as_count(gen["rows"], "generator.rows");
    s.generator = g;
  } else {
    s.initial_agent_positions = as_points(require(root, "agents", "agents", top), "agents");
    const auto ph = require(root, "phases", "phases", top);
    if (!ph.IsSequence()) throw ScenarioError("phases", line_of(ph), "expected a list of phases");
    for (std::size_t p = 0; p < ph.size(); ++p) {
      const std::string path = "phases[" + std::to_string(p + 1) + "]";
      const auto node = ph[p];
      YAML::Node targets = node;
      if (node.IsMap()) {
        reject_unknown_keys(node, path, {"name", "targets"});
        targets = require(node, "targets", path + ".targets", line_of(node));
      }
      s.target_phases.push_back({as_points(targets, path)});
    }
  }
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  const YAML::Node root = [&] {
    try {
      return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
      throw ScenarioError("", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
    }
  }();
  if (!root.IsMap()) throw ScenarioError("", detail::line_of(root), "expected a mapping at top level");
  detail::reject_unknown_keys(root, "",
                              {"format", "world", "phase_trigger", "generator", "agents", "phases"});
  if (const auto f = root["format"]; f && f.as<std::string>() != kScenarioFormat)
    throw ScenarioError("format", detail::line_of(f),
                        "unsupported format '" + f.as<std::string>() + "'");

  Scenario s;
  try {
    detail::parse_body(root, s);
  } catch (const YAML::Exception& e) {
    throw ScenarioError("", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    msg = msg.substr(e.field().size() + 2);  // drop the "field: " prefix
    int line = 0;
    if (const auto w = root["world"]; w.IsMap() && w[e.field()]) line = detail::line_of(w[e.field()]);
    throw ScenarioError(detail::file_path_of(e.field()), line, msg);
  }
  return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", 0, "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    throw e.with_source(path);
  }
}

namespace detail {

inline void emit_number(YAML::Emitter& out, double v) { out << format_double(v); }

inline void emit_point(YAML::Emitter& out, Vec2 p) {
  out << YAML::Flow << YAML::BeginSeq;
  emit_number(out, p.x);
  emit_number(out, p.y);
  out << YAML::EndSeq;
}

}  // namespace detail

/// Writes a scenario that parse_scenario reads back to an equal value.
inline std::string serialize_scenario(const Scenario& s) {
  const WorldConfig& c = s.config;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "format" << YAML::Value << std::string(kScenarioFormat);
  out << YAML::Key << "world" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "region" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "x_min" << YAML::Value << format_double(c.region.x_min);
  out << YAML::Key << "x_max" << YAML::Value << format_double(c.region.x_max);
  out << YAML::Key << "y_min" << YAML::Value << format_double(c.region.y_min);
  out << YAML::Key << "y_max" << YAML::Value << format_double(c.region.y_max);
  out << YAML::EndMap;
  out << YAML::Key << "n" << YAML::Value << c.n_agents;
  out << YAML::Key << "n_t" << YAML::Value << c.n_targets;
  out << YAML::Key << "dt" << YAML::Value << format_double(c.dt);
  out << YAML::Key << "v_max" << YAML::Value << format_double(c.v_max);
  out << YAML::Key << "k_gain" << YAML::Value << format_double(c.k_gain);
  out << YAML::Key << "footprint" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "width" << YAML::Value << format_double(c.footprint.width);
  out << YAML::Key << "height" << YAML::Value << format_double(c.footprint.height);
  out << YAML::EndMap;
  out << YAML::Key << "d_c" << YAML::Value << format_double(c.d_c);
  out << YAML::Key << "d_k" << YAML::Value << format_double(c.d_k);
  out << YAML::Key << "K_d" << YAML::Value << format_double(c.K_d);
  out << YAML::Key << "K_s" << YAML::Value << format_double(c.K_s);
  out << YAML::Key << "collision_distance" << YAML::Value << format_double(c.collision_distance);
  out << YAML::Key << "t_L" << YAML::Value << format_double(c.t_last);
  out << YAML::EndMap;

  out << YAML::Key << "phase_trigger" << YAML::Value << YAML::Flow << YAML::BeginMap;
  if (s.trigger.kind == PhaseTrigger::Kind::FixedDuration) {
    out << YAML::Key << "kind" << YAML::Value << "fixed_duration";
  } else {
    out << YAML::Key << "kind" << YAML::Value << "on_full_coverage";
    out << YAML::Key << "settle" << YAML::Value << format_double(s.trigger.settle);
  }
  out << YAML::EndMap;

  if (s.generator) {
    out << YAML::Key << "generator" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << "random_grid";
    out << YAML::Key << "cols" << YAML::Value << s.generator->cols;
    out << YAML::Key << "rows" << YAML::Value << s.generator->rows;
    out << YAML::EndMap;
  } else {
    out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
    for (Vec2 p : s.initial_agent_positions) detail::emit_point(out, p);
    out << YAML::EndSeq;
    out << YAML::Key << "phases" << YAML::Value << YAML::BeginSeq;
    for (const auto& phase : s.target_phases) {
      out << YAML::BeginMap << YAML::Key << "targets" << YAML::Value << YAML::BeginSeq;
      for (Vec2 p : phase.positions) detail::emit_point(out, p);
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cutin
