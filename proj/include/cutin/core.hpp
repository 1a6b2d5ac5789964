#pragma once

// Shared domain types for the coverage simulator: planar geometry, the
// sensor footprint, world configuration and per-agent state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cutin {

using AgentId = std::size_t;   // 0-based internally, printed 1-based
using TargetId = std::size_t;  // 0-based internally, printed 1-based

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::sqrt(x * x + y * y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct Region {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Vec2 clamp(Vec2 p) const {
    return {std::min(std::max(p.x, x_min), x_max),
            std::min(std::max(p.y, y_min), y_max)};
  }
  bool operator==(const Region&) const = default;
};

// Axis-aligned rectangle centred on the agent.
struct SensorFootprint {
  double width = 1.0;
  double height = 1.0;
  bool operator==(const SensorFootprint&) const = default;
};

// Closed boundary: a target exactly on the footprint edge is covered.
inline bool covers(Vec2 agent_pos, Vec2 target_pos, const SensorFootprint& footprint) {
  return std::abs(target_pos.x - agent_pos.x) <= footprint.width / 2.0 &&
         std::abs(target_pos.y - agent_pos.y) <= footprint.height / 2.0;
}

/// Raised when a configuration or scenario violates one of its invariants.
/// `field()` names the offending field so file loaders can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Immutable physical and protocol parameters of a world.
///
/// Defaults reproduce the 100-agent simulation campaign (20 x 20 m region,
/// 0.02 s step, 5 m/s speed limit). `k_gain` defaults to the speed limit so an
/// agent farther than 1 m from its reference moves at full speed.
struct WorldConfig {
  Region region{};
  std::size_t n_agents = 100;
  std::size_t n_targets = 100;
  double dt = 0.02;
  double v_max = 5.0;
  double k_gain = 5.0;
  SensorFootprint footprint{};
  double d_c = 10.0;
  double d_k = 0.55;
  double K_d = 800.0;
  double K_s = 0.35;
  double collision_distance = 0.3;
  double t_last = 10.0;

  bool operator==(const WorldConfig&) const = default;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    const auto& r = region;
    if (!(std::isfinite(r.x_min) && std::isfinite(r.x_max) && std::isfinite(r.y_min) &&
          std::isfinite(r.y_max)) ||
        !(r.x_min < r.x_max) || !(r.y_min < r.y_max))
      throw ValidationError("region", "requires x_min < x_max and y_min < y_max");
    if (n_agents == 0) throw ValidationError("n", "must be at least 1");
    if (n_targets == 0) throw ValidationError("n_t", "must be at least 1");
    if (!positive(dt)) throw ValidationError("dt", "must be > 0");
    if (!positive(v_max)) throw ValidationError("v_max", "must be > 0");
    if (!positive(k_gain)) throw ValidationError("k_gain", "must be > 0");
    if (!positive(footprint.width) || !positive(footprint.height))
      throw ValidationError("footprint", "width and height must be > 0");
    if (!positive(d_c)) throw ValidationError("d_c", "must be > 0");
    if (!positive(d_k)) throw ValidationError("d_k", "must be > 0");
    if (!std::isfinite(K_d) || K_d < 0.0) throw ValidationError("K_d", "must be >= 0");
    if (!std::isfinite(K_s) || !(K_s > 0.0 && K_s <= 1.0))
      throw ValidationError("K_s", "must lie in (0, 1]");
    if (!std::isfinite(collision_distance) || collision_distance < 0.0)
      throw ValidationError("collision_distance", "must be >= 0");
    if (!(collision_distance < d_k))
      throw ValidationError("collision_distance", "must be smaller than d_k");
    if (!positive(t_last)) throw ValidationError("t_L", "must be > 0");
  }
};

/// Tri-valued per-target memory entry. Null means "never heard about it"
/// and is distinct from Uncovered.
enum class CoverageMark : unsigned char { Null, Uncovered, Covered };

constexpr std::string_view to_string(CoverageMark m) {
  switch (m) {
    case CoverageMark::Uncovered: return "uncovered";
    case CoverageMark::Covered: return "covered";
    case CoverageMark::Null: break;
  }
  return "null";
}

inline std::optional<CoverageMark> parse_coverage_mark(std::string_view s) {
  if (s == "null") return CoverageMark::Null;
  if (s == "uncovered") return CoverageMark::Uncovered;
  if (s == "covered") return CoverageMark::Covered;
  return std::nullopt;
}

struct AgentState {
  AgentId id = 0;
  Vec2 pos{};
  std::vector<CoverageMark> memory;
  std::optional<TargetId> reference;

  AgentState() = default;
  AgentState(AgentId id_, Vec2 pos_, std::size_t n_targets)
      : id(id_), pos(pos_), memory(n_targets, CoverageMark::Null) {}

  void reset_memory() {
    std::fill(memory.begin(), memory.end(), CoverageMark::Null);
    reference.reset();
  }
  bool operator==(const AgentState&) const = default;
};

/// Target positions. Each carries unit importance; everything else is zero.
struct TargetSet {
  std::vector<Vec2> positions;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  Vec2 operator[](TargetId l) const { return positions[l]; }
  bool operator==(const TargetSet&) const = default;

  void validate(const Region& region, const std::string& field = "targets") const {
    for (std::size_t l = 0; l < positions.size(); ++l) {
      if (!positions[l].finite() || !region.contains(positions[l]))
        throw ValidationError(field, "target " + std::to_string(l + 1) + " lies outside the region");
      for (std::size_t m = 0; m < l; ++m)
        if (positions[m] == positions[l])
          throw ValidationError(field, "targets " + std::to_string(m + 1) + " and " +
                                           std::to_string(l + 1) + " coincide");
    }
  }
};

}  // namespace cutin
