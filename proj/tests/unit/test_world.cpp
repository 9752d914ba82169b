#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cnav/world/robot.hpp"
#include "cnav/world/world.hpp"

using namespace cnav;
using doctest::Approx;

namespace {

// Classical RK4 on the unicycle ODE.
RobotState rk4(RobotState s, double v, double w, double dt, int steps) {
    const double h = dt / steps;
    auto f = [&](double th) { return std::array<double, 3>{v * std::cos(th), v * std::sin(th), w}; };
    double x = s.x, y = s.y, th = s.theta;
    for (int i = 0; i < steps; ++i) {
        auto k1 = f(th);
        auto k2 = f(th + 0.5 * h * k1[2]);
        auto k3 = f(th + 0.5 * h * k2[2]);
        auto k4 = f(th + h * k3[2]);
        x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        th += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
    }
    return {x, y, wrap_angle(th), v, w};
}

WorldState open_world() {
    WorldState w;
    w.goal = {5.0, 0.0};
    return w;
}

}  // namespace

TEST_CASE("step_robot closed-form examples") {
    const RobotState s{};
    auto a = step_robot(s, {1.0, 0.0}, 1.0);
    CHECK(a.x == Approx(1.0));
    CHECK(a.y == Approx(0.0));
    CHECK(a.theta == Approx(0.0));

    auto b = step_robot(s, {0.0, std::numbers::pi}, 1.0);
    CHECK(b.x == 0.0);
    CHECK(b.y == 0.0);
    CHECK(b.theta == Approx(std::numbers::pi));

    auto c = step_robot(s, {1.0, 1.0}, 1.0);
    CHECK(c.x == Approx(std::sin(1.0)).epsilon(1e-12));
    CHECK(c.y == Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
    CHECK(c.theta == Approx(1.0));
    CHECK(c.v == 1.0);
    CHECK(c.w == 1.0);
}

TEST_CASE("step_robot agrees with RK4 on random arcs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-5, 5), ang(-3.1, 3.1), vel(0, 1), rate(-3, 3), dt(0.01, 2);
    for (int i = 0; i < 200; ++i) {
        const RobotState s{pos(rng), pos(rng), ang(rng), 0, 0};
        const double v = vel(rng), w = rate(rng), h = dt(rng);
        const auto exact = step_robot(s, {v, w}, h);
        const auto ref = rk4(s, v, w, h, 10000);
        CHECK(exact.x == Approx(ref.x).epsilon(1e-9).scale(1.0));
        CHECK(exact.y == Approx(ref.y).epsilon(1e-9).scale(1.0));
        CHECK(std::abs(wrap_angle(exact.theta - ref.theta)) < 1e-9);
    }
}

TEST_CASE("two half steps compose to one full step") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> pos(-5, 5), ang(-3.1, 3.1), vel(0, 1), rate(-3, 3), dt(0.01, 2);
    for (int i = 0; i < 1000; ++i) {
        const RobotState s{pos(rng), pos(rng), ang(rng), 0, 0};
        const VelocityCommand cmd{vel(rng), i % 10 == 0 ? 0.0 : rate(rng)};
        const double h = dt(rng);
        const auto full = step_robot(s, cmd, h);
        const auto half = step_robot(step_robot(s, cmd, h / 2), cmd, h / 2);
        CHECK(std::abs(full.x - half.x) < 1e-12);
        CHECK(std::abs(full.y - half.y) < 1e-12);
        CHECK(std::abs(wrap_angle(full.theta - half.theta)) < 1e-12);
    }
}

TEST_CASE("heading stays wrapped") {
    RobotState s{0, 0, 3.0, 0, 0};
    for (int i = 0; i < 100; ++i) {
        s = step_robot(s, {0.1, 2.84}, 0.37);
        CHECK(s.theta > -std::numbers::pi);
        CHECK(s.theta <= std::numbers::pi);
    }
    CHECK(wrap_angle(-std::numbers::pi) == Approx(std::numbers::pi));
}

TEST_CASE("clip_command respects the velocity box") {
    const RobotLimits lim{};
    CHECK(clip_command({1.0, 5.0}, lim) == VelocityCommand{0.22, 2.84});
    CHECK(clip_command({-1.0, -5.0}, lim) == VelocityCommand{0.0, -2.84});
    CHECK(clip_command({0.1, 0.5}, lim) == VelocityCommand{0.1, 0.5});
}

TEST_CASE("min_obstacle_distance") {
    std::vector<Obstacle> obs{Obstacle::disc({1, 0}, 0.3)};
    CHECK(min_obstacle_distance({0, 0}, obs, std::nullopt) == Approx(0.7));
    CHECK(std::isinf(min_obstacle_distance({0, 0}, {}, std::nullopt)));

    obs.push_back(Obstacle::disc({0, 0.5}, 0.1));
    CHECK(min_obstacle_distance({0, 0}, obs, std::nullopt) == Approx(0.4));

    // Brute force over random sets.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4, 4), r(0.05, 0.5);
    for (int t = 0; t < 100; ++t) {
        std::vector<Obstacle> set;
        double best = std::numeric_limits<double>::infinity();
        const Vec2 p{u(rng), u(rng)};
        for (int i = 0; i < 6; ++i) {
            const Vec2 c{u(rng), u(rng)};
            const double rad = r(rng);
            set.push_back(Obstacle::disc(c, rad));
            best = std::min(best, distance(p, c) - rad);
        }
        CHECK(min_obstacle_distance(p, set, std::nullopt) == Approx(best).epsilon(1e-12));
    }

    // Penetration is not clipped.
    CHECK(min_obstacle_distance({1, 0}, obs, std::nullopt) == Approx(-0.3));

    // Segments and walls.
    std::vector<Obstacle> wall{Obstacle::segment({2, -1}, {2, 1})};
    CHECK(min_obstacle_distance({0, 0}, wall, std::nullopt) == Approx(2.0));
    CHECK(min_obstacle_distance({0, 0}, {}, Bounds::centered_square(4.0)) == Approx(2.0));
}

TEST_CASE("events") {
    WorldState w = open_world();
    w.obstacles.push_back(Obstacle::disc({0.55, 0}, 0.5));  // surface 0.05 m away
    CHECK(detect_events(w).collision);

    w.obstacles[0] = Obstacle::disc({0.6, 0}, 0.5);  // exactly 0.1 m
    CHECK(detect_events(w).collision);

    w.obstacles[0] = Obstacle::disc({0.7, 0}, 0.5);
    CHECK_FALSE(detect_events(w).collision);

    w.robot.x = 4.85;  // 0.15 m from the goal
    w.obstacles.clear();
    CHECK(detect_events(w).goal_reached);
    w.robot.x = 4.8;  // 0.2 m exactly: strict inequality
    CHECK_FALSE(detect_events(w).goal_reached);

    WorldState open = open_world();
    open.robot.x = 1.0;
    CHECK_FALSE(detect_events(open).any());

    open.time = open.params.time_limit;
    CHECK(detect_events(open).timeout);
}

TEST_CASE("step_world advances robot and agents deterministically") {
    WorldState w = open_world();
    w.arena = Bounds::centered_square(10.0);
    w.obstacles.push_back(Obstacle::agent({2, 2}, 0.2, 0.8, {-3, 2}));
    w.obstacles.push_back(Obstacle::agent({-2, -2}, 0.2, 0.6, {3, -2}));
    w.obstacles.push_back(Obstacle::disc({0, 3}, 0.3));
    w.rng.seed(99);

    WorldState a = w, b = w;
    for (int i = 0; i < 400; ++i) {
        const VelocityCommand cmd{0.1 + 0.0002 * i, std::sin(0.1 * i)};
        const Events ea = step_world_inplace(a, cmd, 0.05);
        const auto sb = step_world(b, cmd, 0.05);
        b = sb.world;
        REQUIRE(ea == sb.events);
        REQUIRE(a.robot == b.robot);
        REQUIRE(a.obstacles == b.obstacles);
        for (const auto& o : a.obstacles) {
            if (o.is_dynamic()) CHECK(norm(o.velocity) <= o.pref_speed + 1e-9);
            if (ea.any()) break;
        }
        if (ea.any()) break;
    }
    CHECK(a.time > 0.0);
    CHECK(a.obstacles[2] == w.obstacles[2]);  // static obstacles never move
}

TEST_CASE("robot moves before the agents read the snapshot") {
    WorldState w = open_world();
    w.robot = {0, 0, 0, 0, 0};
    auto out = step_world(w, {0.2, 0.0}, 0.5);
    CHECK(out.world.robot.x == Approx(0.1));
    CHECK(out.world.time == Approx(0.5));
}
