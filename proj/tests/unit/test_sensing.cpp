#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cnav/world/sensing.hpp"

using namespace cnav;
using doctest::Approx;

namespace {

WorldState robot_facing_x() {
    WorldState w;
    w.robot = {0, 0, 0, 0, 0};
    w.goal = {10, 0};
    w.params.sensor.rays = 8;
    w.params.sensor.fov = 2.0 * std::numbers::pi;
    w.params.sensor.max_range = 3.5;
    return w;
}

// Index of the ray pointing straight ahead in a full-circle fan of 8.
constexpr int kForward = 4;

}  // namespace

TEST_CASE("ray angles") {
    SensorParams full{8, 2.0 * std::numbers::pi, 3.5};
    CHECK(ray_angle(full, 0) == Approx(-std::numbers::pi));
    CHECK(ray_angle(full, kForward) == Approx(0.0).scale(1.0));
    SensorParams fan{5, std::numbers::pi, 3.5};
    CHECK(ray_angle(fan, 0) == Approx(-std::numbers::pi / 2));
    CHECK(ray_angle(fan, 4) == Approx(std::numbers::pi / 2));
}

TEST_CASE("empty unbounded world reads max range everywhere") {
    const auto scan = sense(robot_facing_x());
    REQUIRE(scan.ranges.size() == 8);
    for (double r : scan.ranges) CHECK(r == 3.5);
    CHECK(scan.max_range == 3.5);
}

TEST_CASE("perpendicular wall two metres ahead") {
    auto w = robot_facing_x();
    w.obstacles.push_back(Obstacle::segment({2, -1}, {2, 1}));
    const auto scan = sense(w);
    CHECK(scan.ranges[kForward] == Approx(2.0));
}

TEST_CASE("disc three metres ahead") {
    auto w = robot_facing_x();
    w.obstacles.push_back(Obstacle::disc({3, 0}, 0.5));
    const auto scan = sense(w);
    CHECK(scan.ranges[kForward] == Approx(2.5));
}

TEST_CASE("scan follows the robot heading") {
    auto w = robot_facing_x();
    w.robot.theta = std::numbers::pi / 2;
    w.obstacles.push_back(Obstacle::disc({0, 3}, 0.5));
    CHECK(sense(w).ranges[kForward] == Approx(2.5));
}

TEST_CASE("arena walls are seen") {
    auto w = robot_facing_x();
    w.arena = Bounds::centered_square(4.0);
    const auto scan = sense(w);
    CHECK(scan.ranges[kForward] == Approx(2.0));
    CHECK(scan.ranges[0] == Approx(2.0));
}

TEST_CASE("adding an obstacle never lengthens a ray") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3, 3), r(0.1, 0.6);
    for (int t = 0; t < 100; ++t) {
        auto w = robot_facing_x();
        w.params.sensor.rays = 24;
        w.robot.theta = u(rng);
        for (int i = 0; i < 3; ++i) {
            Vec2 c{u(rng), u(rng)};
            if (norm(c) < 1.0) c = c * (1.0 / std::max(norm(c), 1e-3));
            w.obstacles.push_back(Obstacle::disc(c, r(rng)));
        }
        const auto before = sense(w);
        if (t % 2) {
            w.obstacles.push_back(Obstacle::segment({u(rng), u(rng)}, {u(rng), u(rng)}));
        } else {
            w.obstacles.push_back(Obstacle::disc({u(rng), u(rng)}, r(rng)));
        }
        const auto after = sense(w);
        for (std::size_t i = 0; i < before.ranges.size(); ++i) CHECK(after.ranges[i] <= before.ranges[i]);
    }
}

TEST_CASE("ObstacleField queries") {
    std::vector<Obstacle> obs{Obstacle::disc({2, 0}, 0.5)};
    ObstacleField f(obs, Bounds::centered_square(10.0));
    CHECK(f.ray({0, 0}, {1, 0}, 5.0) == Approx(1.5));
    CHECK(f.ray({0, 0}, {0, 1}, 3.0) == 3.0);
    CHECK(f.ray({0, 0}, {0, 1}, 10.0) == Approx(5.0));
    CHECK(f.ray({2, 0}, {1, 0}, 5.0) == 0.0);
    CHECK(f.blocked({2, 0.1}));
    CHECK_FALSE(f.blocked({0, 0}));
    CHECK(f.blocked({6, 0}));
}
