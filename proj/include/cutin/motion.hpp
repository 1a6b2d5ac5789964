#pragma once

// Single-integrator agent motion: proportional attraction to the reference,
// Gaussian-decay repulsion between nearby agents, and an explicit Euler step
// with norm saturation and region clamping.

#include <cmath>
#include <optional>
#include <span>

#include "cutin/core.hpp"

namespace cutin {

struct ControlInput {
  Vec2 u{};        // attraction
  Vec2 du{};       // repulsion
  Vec2 applied{};  // saturated u + du
};

inline Vec2 attraction(Vec2 x, std::optional<Vec2> reference, double k_gain) {
  if (!reference) return {};
  return k_gain * (*reference - x);
}

/// Repulsion gain: the full gain for agents that own a target, scaled down
/// by `K_s` for agents travelling outside their own region.
inline double repulsion_gain(bool has_assigned, double K_d, double K_s) {
  return has_assigned ? K_d : K_s * K_d;
}

/// Sum of k_d * exp(-r^2) * (x_i - x_j) / r over agents j != i with r <= d_k.
///
/// Coincident agents get a fixed separating direction: +x for the lower id,
/// -x for the higher one.
inline Vec2 repulsion(AgentId i, std::span<const Vec2> positions, bool has_assigned, double K_d,
                      double K_s, double d_k) {
  const double k_d = repulsion_gain(has_assigned, K_d, K_s);
  const Vec2 xi = positions[i];
  Vec2 du{};
  for (AgentId j = 0; j < positions.size(); ++j) {
    if (j == i) continue;
    const Vec2 diff = xi - positions[j];
    const double r2 = diff.squared_norm();
    const double r = std::sqrt(r2);
    if (r > d_k) continue;
    if (r == 0.0) {
      du += Vec2{i < j ? k_d : -k_d, 0.0};
      continue;
    }
    du += (k_d * std::exp(-r2) / r) * diff;
  }
  return du;
}

inline Vec2 saturate(Vec2 v, double v_max) {
  const double speed = v.norm();
  if (speed > v_max) return v * (v_max / speed);
  return v;
}

/// One Euler step of x' = u + du with |u + du| clamped to v_max, then
/// clamped componentwise into the region.
inline Vec2 integrate(Vec2 x, Vec2 u, Vec2 du, double dt, double v_max, const Region& region) {
  const Vec2 v = saturate(u + du, v_max);
  return region.clamp(x + dt * v);
}

}  // namespace cutin
