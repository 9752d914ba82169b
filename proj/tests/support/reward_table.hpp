#pragma once

#include <cmath>
#include <random>

#include "cnav/corridor/safe_corridor.hpp"
#include "cnav/dwa/dwa_planner.hpp"
#include "cnav/reward/reward.hpp"
#include "oracles.hpp"

namespace reward_table {

struct Tally {
    int rows{0};
    int mismatches{0};
    int goal_hits{0};
    int collisions{0};
    int inside{0};
    int no_corridor{0};
};

inline bool inside_any(const cnav::corridor::SafeCorridor& c, cnav::Vec2 p) {
    for (const auto& poly : c.polygons) {
        bool in = true;
        for (std::size_t i = 0; i < poly.size() && in; ++i) {
            const cnav::Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
            in = cnav::cross(b - a, p - a) / cnav::norm(b - a) >= -1e-9;
        }
        if (in) return true;
    }
    return false;
}

/// Random states run through total_reward and through the case table; any
/// difference in any term, however small, counts as a mismatch.
inline Tally run(std::uint64_t seed, int rows) {
    using namespace cnav;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3, 3), rad(0.1, 0.4), vel(0, 0.22), rate(-2.84, 2.84), ang(-3, 3),
        near(0.0, 0.35), unit(0, 1);
    Tally tally;
    for (int i = 0; i < rows; ++i) {
        WorldState w;
        const int n = static_cast<int>(unit(rng) * 4);
        for (int k = 0; k < n; ++k) w.obstacles.push_back(Obstacle::disc({u(rng), u(rng)}, rad(rng)));

        RobotState robot{u(rng), u(rng), ang(rng), vel(rng), rate(rng)};
        if (i % 7 == 0) robot.w = robot.v;  // exercise |v - w| = 0
        // Place the goal close often enough to hit both sides of the 0.2 m threshold.
        const double gd = i % 3 == 0 ? near(rng) : 0.2 + unit(rng) * 5.0;
        const double ga = ang(rng);
        const Vec2 goal{robot.x + gd * std::cos(ga), robot.y + gd * std::sin(ga)};
        if (i % 5 == 0 && !w.obstacles.empty()) {
            // Put an obstacle surface within reach of the 0.1 m threshold.
            const double r = w.obstacles[0].radius;
            w.obstacles[0].center = robot.position() + Vec2{r + near(rng) * 0.6, 0.0};
        }
        const Vec2 start{robot.x + u(rng), robot.y + u(rng)};
        const auto mode = i % 2 ? reward::CorridorMode::literal : reward::CorridorMode::intent;

        corridor::SafeCorridor cor;
        if (i % 4 != 0) {
            dwa::CandidateTrajectory c;
            c.v = vel(rng) + 0.05;
            c.w = rate(rng) * 0.3;
            const RobotState origin{robot.x + u(rng) * 0.2, robot.y + u(rng) * 0.2, ang(rng), 0, 0};
            c.poses = dwa::rollout(origin, {c.v, c.w}, 16, 0.2);
            try {
                cor = corridor::build_corridor(c, w, {5, 1.5}, 0.2);
            } catch (const corridor::CorridorError&) {
            }
        }
        const bool has = !cor.empty();
        const bool in = has && inside_any(cor, robot.position());

        double min_d = std::numeric_limits<double>::infinity();
        for (const auto& o : w.obstacles) min_d = std::min(min_d, cnav::distance(robot.position(), o.center) - o.radius);
        const double goal_dist = std::sqrt((robot.x - goal.x) * (robot.x - goal.x) + (robot.y - goal.y) * (robot.y - goal.y));
        const double d = std::sqrt((robot.x - start.x) * (robot.x - start.x) + (robot.y - start.y) * (robot.y - start.y));
        const auto expected = oracle::reward_by_cases(goal_dist, robot.v, robot.w, min_d, has, in, d, mode);

        const auto got = reward::total_reward(robot, w, goal, start, has ? &cor : nullptr, mode);
        const bool same = got.r_goal == expected.goal && got.r_collision == expected.collision &&
                          got.r_corridor == expected.corridor &&
                          got.r_total == got.r_goal + got.r_collision + got.r_corridor;
        ++tally.rows;
        if (!same) ++tally.mismatches;
        if (expected.goal == 100.0) ++tally.goal_hits;
        if (expected.collision != 0.0) ++tally.collisions;
        if (in) ++tally.inside;
        if (!has) ++tally.no_corridor;
    }
    return tally;
}

}  // namespace reward_table
