#include "cnav/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cnav/world/orca.hpp"

namespace cnav {

Obstacle Obstacle::disc(Vec2 center, double radius) {
    Obstacle o;
    o.kind = ObstacleKind::static_disc;
    o.center = center;
    o.radius = radius;
    return o;
}

Obstacle Obstacle::segment(Vec2 a, Vec2 b) {
    Obstacle o;
    o.kind = ObstacleKind::static_segment;
    o.center = a;
    o.end = b;
    return o;
}

Obstacle Obstacle::agent(Vec2 center, double radius, double pref_speed, Vec2 waypoint) {
    Obstacle o;
    o.kind = ObstacleKind::dynamic_agent;
    o.center = center;
    o.radius = radius;
    o.pref_speed = pref_speed;
    o.waypoint = waypoint;
    return o;
}

double Obstacle::surface_distance(Vec2 p) const {
    if (kind == ObstacleKind::static_segment) return distance(p, closest_point_on_segment(p, center, end));
    return distance(p, center) - radius;
}

Vec2 Obstacle::reference_point(Vec2 from) const {
    if (kind == ObstacleKind::static_segment) return closest_point_on_segment(from, center, end);
    return center;
}

double Bounds::clearance(Vec2 p) const {
    return std::min({p.x - min_x, max_x - p.x, p.y - min_y, max_y - p.y});
}

std::vector<Obstacle> Bounds::walls() const {
    return {Obstacle::segment({min_x, min_y}, {max_x, min_y}), Obstacle::segment({max_x, min_y}, {max_x, max_y}),
            Obstacle::segment({max_x, max_y}, {min_x, max_y}), Obstacle::segment({min_x, max_y}, {min_x, min_y})};
}

double min_obstacle_distance(Vec2 p, std::span<const Obstacle> obstacles, const std::optional<Bounds>& arena) {
    double best = std::numeric_limits<double>::infinity();
    for (const Obstacle& o : obstacles) best = std::min(best, o.surface_distance(p));
    if (arena) best = std::min(best, arena->clearance(p));
    return best;
}

double min_obstacle_distance(const WorldState& world) {
    return min_obstacle_distance(world.robot.position(), world.obstacles, world.arena);
}

Events detect_events(const WorldState& world) {
    Events ev;
    ev.collision = min_obstacle_distance(world) <= world.params.collision_distance;
    ev.goal_reached = distance(world.robot.position(), world.goal) < world.params.goal_tolerance;
    ev.timeout = world.time >= world.params.time_limit - 1e-9;
    return ev;
}

namespace {

Vec2 sample_waypoint(WorldState& world, double radius) {
    const Bounds& a = *world.arena;
    const double margin = std::max(world.params.orca.waypoint_margin, radius);
    std::uniform_real_distribution<double> ux(a.min_x + margin, a.max_x - margin);
    std::uniform_real_distribution<double> uy(a.min_y + margin, a.max_y - margin);
    const double x = ux(world.rng);
    const double y = uy(world.rng);
    return {x, y};
}

Vec2 preferred_velocity(const Obstacle& agent, double dt) {
    const Vec2 to_target = agent.waypoint - agent.center;
    const double dist = norm(to_target);
    if (dist < 1e-12) return {};
    const double speed = std::min(agent.pref_speed, dist / dt);
    return to_target * (speed / dist);
}

}  // namespace

Events step_world_inplace(WorldState& world, VelocityCommand cmd, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_world: dt must be positive");
    const OrcaParams& orca = world.params.orca;
    const std::vector<Obstacle> snapshot = world.obstacles;
    const RobotState robot_before = world.robot;

    world.robot = step_robot(world.robot, clip_command(cmd, world.params.limits), dt);

    std::vector<Obstacle> walls;
    if (world.arena) walls = world.arena->walls();

    std::vector<Vec2> new_velocity(snapshot.size());
    std::vector<OrcaBody> bodies;
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        const Obstacle& self = snapshot[i];
        if (!self.is_dynamic()) continue;
        bodies.clear();
        const double range = orca.neighbor_dist;
        for (std::size_t j = 0; j < snapshot.size(); ++j) {
            if (j == i) continue;
            if (snapshot[j].surface_distance(self.center) - self.radius > range) continue;
            bodies.push_back(as_orca_body(self, snapshot[j], orca.reciprocity));
        }
        for (const Obstacle& wall : walls) {
            if (wall.surface_distance(self.center) - self.radius > range) continue;
            bodies.push_back(as_orca_body(self, wall, orca.reciprocity));
        }
        if (orca.obstacles_avoid_robot) {
            bodies.push_back({robot_before.position(), robot_before.velocity(), orca.robot_radius, 1.0});
        }
        const OrcaBody me{self.center, self.velocity, self.radius, 1.0};
        new_velocity[i] = orca_velocity(me, self.pref_speed, bodies, preferred_velocity(self, dt),
                                        orca.time_horizon, dt);
    }

    for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
        Obstacle& o = world.obstacles[i];
        if (!o.is_dynamic()) continue;
        // Enforce the speed bound against rounding in the solver.
        Vec2 v = new_velocity[i];
        const double speed = norm(v);
        if (speed > o.pref_speed) v *= o.pref_speed / speed;
        o.velocity = v;
        o.center += v * dt;
        if (world.arena) {
            const Bounds& a = *world.arena;
            o.center.x = std::clamp(o.center.x, a.min_x + o.radius, a.max_x - o.radius);
            o.center.y = std::clamp(o.center.y, a.min_y + o.radius, a.max_y - o.radius);
            if (distance(o.center, o.waypoint) < orca.waypoint_tolerance) o.waypoint = sample_waypoint(world, o.radius);
        }
    }

    world.time += dt;
    return detect_events(world);
}

StepOutcome step_world(WorldState world, VelocityCommand cmd, double dt) {
    const Events ev = step_world_inplace(world, cmd, dt);
    return {std::move(world), ev};
}

}  // namespace cnav
