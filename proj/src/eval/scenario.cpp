#include "cnav/eval/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cnav::eval {

Vec2 ScenarioSpec::goal(std::size_t index) const {
    const double bearing = goal_bearings_deg.at(index % goal_bearings_deg.size()) * std::numbers::pi / 180.0;
    return start() + goal_distance * Vec2{std::cos(bearing), std::sin(bearing)};
}

void ScenarioSpec::validate() const {
    const auto fail = [](const std::string& field) { throw std::invalid_argument("scenario." + field + " out of range"); };
    if (obstacle_count < 0) fail("obstacle_count");
    if (!(arena_side > 0.0)) fail("arena_side");
    if (!(start_offset > 0.0) || start_offset >= arena_side) fail("start_offset");
    if (!(goal_distance > 0.0)) fail("goal_distance");
    if (goal_bearings_deg.empty()) fail("goal_bearings_deg");
    if (!(speed_min > 0.0) || speed_max < speed_min) fail("speed_min");
    if (!(obstacle_radius > 0.0)) fail("obstacle_radius");
    if (min_clearance < 0.0) fail("min_clearance");
    if (endpoint_clearance < 0.0) fail("endpoint_clearance");
    if (max_attempts <= 0) fail("max_attempts");
    const Bounds arena = Bounds::centered_square(arena_side);
    for (std::size_t g = 0; g < goal_count(); ++g) {
        if (!arena.contains(goal(g))) fail("goal_bearings_deg");
    }
}

WorldState make_scenario(const ScenarioSpec& spec, std::size_t goal_index, std::mt19937_64& rng,
                         const WorldParams& params) {
    spec.validate();
    WorldState world;
    world.params = params;
    world.arena = Bounds::centered_square(spec.arena_side);
    world.start = spec.start();
    world.goal = spec.goal(goal_index);
    world.robot.x = world.start.x;
    world.robot.y = world.start.y;
    world.robot.theta = std::numbers::pi / 2;

    const Bounds& arena = *world.arena;
    const double r = spec.obstacle_radius;
    const double margin = std::max(r, params.orca.waypoint_margin);
    std::uniform_real_distribution<double> ux(arena.min_x + margin, arena.max_x - margin);
    std::uniform_real_distribution<double> uy(arena.min_y + margin, arena.max_y - margin);
    std::uniform_real_distribution<double> speed(spec.speed_min, spec.speed_max);

    std::vector<Vec2> endpoints{world.start};
    for (std::size_t g = 0; g < spec.goal_count(); ++g) endpoints.push_back(spec.goal(g));

    int attempts = 0;
    std::vector<Vec2> centers;
    while (static_cast<int>(centers.size()) < spec.obstacle_count) {
        if (attempts++ >= spec.max_attempts) throw ArenaTooDense();
        const Vec2 c{ux(rng), uy(rng)};
        bool ok = true;
        for (const Vec2& e : endpoints) ok = ok && distance(c, e) - r >= spec.endpoint_clearance;
        for (const Vec2& o : centers) ok = ok && distance(c, o) - 2 * r >= spec.min_clearance;
        if (ok) centers.push_back(c);
    }
    for (const Vec2& c : centers) {
        const double s = speed(rng);
        const Vec2 waypoint{ux(rng), uy(rng)};
        Obstacle agent = Obstacle::agent(c, r, s, waypoint);
        const Vec2 to = waypoint - c;
        const double len = norm(to);
        if (len > 0.0) agent.velocity = (s / len) * to;
        world.obstacles.push_back(agent);
    }
    world.rng.seed(rng());
    return world;
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
    const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
    return std::mt19937_64(seq);
}

}  // namespace cnav::eval
