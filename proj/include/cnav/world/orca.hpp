#pragma once

#include <span>
#include <vector>

#include "cnav/vec2.hpp"
#include "cnav/world/world.hpp"

namespace cnav {

/// Directed line bounding the permitted half-plane on its left side.
struct OrcaLine {
    Vec2 point;
    Vec2 direction;
};

/// A body another agent has to avoid, as seen by the velocity solver.
struct OrcaBody {
    Vec2 position;
    Vec2 velocity;
    double radius{0.0};
    /// Fraction of the avoidance effort taken by the solving agent
    /// (0.5 between two reciprocal agents, 1.0 against passive bodies).
    double responsibility{1.0};
};

/// ORCA half-plane induced on `self` by `other`.
OrcaLine orca_half_plane(const OrcaBody& self, const OrcaBody& other, double time_horizon, double dt);

/// Velocity closest to pref_vel inside the disc of radius max_speed that
/// satisfies every half-plane; when infeasible, the velocity minimising the
/// largest violation.
Vec2 solve_orca_program(std::span<const OrcaLine> lines, double max_speed, Vec2 pref_vel);

Vec2 orca_velocity(const OrcaBody& self, double max_speed, std::span<const OrcaBody> others,
                   Vec2 pref_vel, double time_horizon, double dt);

/// Converts a neighbouring obstacle into the body seen by `agent`:
/// dynamic agents are reciprocal, discs and segments (closest point) passive.
OrcaBody as_orca_body(const Obstacle& agent, const Obstacle& neighbor, double reciprocity);

/// ORCA velocity for a dynamic agent among neighbouring obstacles.
Vec2 orca_velocity(const Obstacle& agent, std::span<const Obstacle> neighbors, Vec2 pref_vel,
                   double time_horizon, double dt, double reciprocity = 0.5);

}  // namespace cnav
