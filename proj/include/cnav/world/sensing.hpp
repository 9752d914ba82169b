#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cnav/world/world.hpp"

namespace cnav {

/// Obstacles and arena walls laid out for repeated ray and point queries.
/// Discs are stored structure-of-arrays for the SIMD ray kernel.
class ObstacleField {
public:
    ObstacleField(std::span<const Obstacle> obstacles, const std::optional<Bounds>& arena);
    explicit ObstacleField(const WorldState& world);

    /// Distance along the unit direction `dir` to the first obstacle surface
    /// or wall, clipped to max_t. 0 when origin is inside an obstacle.
    double ray(Vec2 origin, Vec2 dir, double max_t) const;

    /// True when p is strictly inside an obstacle or outside the arena.
    bool blocked(Vec2 p) const;

private:
    std::vector<double> cx_;
    std::vector<double> cy_;
    std::vector<double> radius_;
    std::vector<std::pair<Vec2, Vec2>> segments_;
    std::optional<Bounds> arena_;
};

/// Fixed-length range scan, robot frame.
struct ScanObservation {
    std::vector<double> ranges;
    double max_range{0.0};
};

/// Bearing of ray i relative to the robot heading. A full circle starts at
/// -pi; a partial fan spans [-fov/2, fov/2] inclusive.
double ray_angle(const SensorParams& sensor, int i);

ScanObservation sense(const WorldState& world);

}  // namespace cnav
