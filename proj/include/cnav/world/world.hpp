#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cnav/vec2.hpp"
#include "cnav/world/robot.hpp"

namespace cnav {

enum class ObstacleKind { static_disc, static_segment, dynamic_agent };

/// A disc, a wall segment or an ORCA-driven disc agent.
struct Obstacle {
    ObstacleKind kind{ObstacleKind::static_disc};
    Vec2 center;      ///< disc/agent centre, or first segment endpoint
    Vec2 end;         ///< second segment endpoint (segments only)
    double radius{0.0};
    Vec2 velocity;    ///< dynamic agents only
    double pref_speed{0.0};
    Vec2 waypoint;    ///< current routing target of a dynamic agent

    static Obstacle disc(Vec2 center, double radius);
    static Obstacle segment(Vec2 a, Vec2 b);
    static Obstacle agent(Vec2 center, double radius, double pref_speed, Vec2 waypoint);

    bool is_dynamic() const { return kind == ObstacleKind::dynamic_agent; }
    /// Signed distance from p to the obstacle surface (negative inside).
    double surface_distance(Vec2 p) const;
    /// Point used as the obstacle position by distance-based costs.
    Vec2 reference_point(Vec2 from) const;

    bool operator==(const Obstacle&) const = default;
};

/// Axis-aligned arena.
struct Bounds {
    double min_x{0.0};
    double min_y{0.0};
    double max_x{0.0};
    double max_y{0.0};

    static Bounds centered_square(double side) { return {-side / 2, -side / 2, side / 2, side / 2}; }
    bool contains(Vec2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
    /// Distance to the nearest wall, negative outside.
    double clearance(Vec2 p) const;
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    std::vector<Obstacle> walls() const;

    bool operator==(const Bounds&) const = default;
};

struct OrcaParams {
    double time_horizon{2.0};
    double neighbor_dist{5.0};
    double reciprocity{0.5};          ///< share taken between two dynamic agents
    bool obstacles_avoid_robot{false};
    double robot_radius{0.1};         ///< radius the agents assume for the robot
    double waypoint_tolerance{0.3};
    double waypoint_margin{0.5};      ///< waypoints stay this far from walls
};

struct SensorParams {
    int rays{24};
    double fov{2.0 * std::numbers::pi};
    double max_range{3.5};
};

struct WorldParams {
    RobotLimits limits;
    SensorParams sensor;
    OrcaParams orca;
    double collision_distance{0.1};
    double goal_tolerance{0.2};
    double time_limit{60.0};
};

struct WorldState {
    RobotState robot;
    std::vector<Obstacle> obstacles;
    Vec2 goal;
    Vec2 start;  ///< where the episode began
    std::optional<Bounds> arena;
    double time{0.0};
    WorldParams params;
    std::mt19937_64 rng{0};
};

/// Bit set of step events.
struct Events {
    bool collision{false};
    bool goal_reached{false};
    bool timeout{false};

    bool any() const { return collision || goal_reached || timeout; }
    bool operator==(const Events&) const = default;
};

/// Smallest signed surface distance from p to any obstacle or arena wall.
/// +infinity when there is nothing to measure against.
double min_obstacle_distance(Vec2 p, std::span<const Obstacle> obstacles,
                             const std::optional<Bounds>& arena);
double min_obstacle_distance(const WorldState& world);

/// Event classification of the current state.
Events detect_events(const WorldState& world);

/// Advances the world in place by dt: robot first, then every dynamic agent
/// using ORCA velocities computed from the pre-step snapshot.
Events step_world_inplace(WorldState& world, VelocityCommand cmd, double dt);

struct StepOutcome {
    WorldState world;
    Events events;
};

StepOutcome step_world(WorldState world, VelocityCommand cmd, double dt);

}  // namespace cnav
