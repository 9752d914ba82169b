#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cnav/dwa/dwa_planner.hpp"
#include "cnav/vec2.hpp"
#include "cnav/world/sensing.hpp"
#include "cnav/world/world.hpp"

namespace cnav::corridor {

struct CorridorError : std::runtime_error {
    enum class Kind { no_corridor, undefined_normal, anchor_infeasible };
    Kind kind;
    CorridorError(Kind k, const char* what) : std::runtime_error(what), kind(k) {}
};

/// Reference path samples p(t) with their tangent velocities.
struct ReferenceTrajectory {
    std::vector<Vec2> points;
    std::vector<Vec2> velocities;
    double t0{0.0};
    double tm{0.0};
};

/// Section line through an anchor, orthogonal to the unit path direction n.
struct NormalSection {
    Vec2 anchor;
    Vec2 n;
    std::array<Vec2, 2> boundary_points;  ///< {left, right} of the travel direction

    double width() const { return distance(boundary_points[0], boundary_points[1]); }
};

/// Chain of convex polygons, polygon k spanning sections k and k+1.
struct SafeCorridor {
    std::vector<NormalSection> sections;
    std::vector<std::vector<Vec2>> polygons;  ///< counter-clockwise vertex lists

    bool empty() const { return polygons.empty(); }
};

struct Params {
    int sections{5};
    double half_width_max{1.5};
};

/// K samples at uniform parameter spacing over the candidate's horizon,
/// evaluated on its exact arc.
ReferenceTrajectory reference_points(const dwa::CandidateTrajectory& traj, int k, double rollout_dt);

/// Unit path direction; throws undefined_normal for a zero velocity.
Vec2 normal_direction(Vec2 velocity);

/// First obstacle or wall hit on each side of the section line, clipped at
/// half_width_max. Throws anchor_infeasible when the anchor is blocked.
std::array<Vec2, 2> boundary_points(Vec2 anchor, Vec2 n, const ObstacleField& field, double half_width_max);
std::array<Vec2, 2> boundary_points(Vec2 anchor, Vec2 n, const WorldState& world, double half_width_max);

/// Sections along the reference path and one hull per consecutive pair. A
/// failing section truncates the corridor at that point. Throws
/// no_corridor for a zero-length reference.
SafeCorridor build_corridor(const dwa::CandidateTrajectory& traj, const WorldState& world, const Params& params,
                            double rollout_dt);

struct Membership {
    bool inside{false};
    double margin{0.0};  ///< signed distance to the boundary, positive inside
};

/// Signed distance from p to a convex CCW polygon boundary.
double signed_distance(std::span<const Vec2> polygon, Vec2 p);

Membership contains(const SafeCorridor& corridor, Vec2 p);

}  // namespace cnav::corridor
