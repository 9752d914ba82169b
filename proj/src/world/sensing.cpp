#include "cnav/world/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cnav/simd/kernels.hpp"

namespace cnav {
namespace {

constexpr double kMinRange = 1e-6;

// First t >= 0 where origin + t*dir crosses segment [a, b]; negative if none.
double ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
    const Vec2 e = b - a;
    const double denom = cross(dir, e);
    if (std::abs(denom) < 1e-12) return -1.0;
    const Vec2 ao = a - origin;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, dir) / denom;
    if (t < 0.0 || s < 0.0 || s > 1.0) return -1.0;
    return t;
}

}  // namespace

ObstacleField::ObstacleField(std::span<const Obstacle> obstacles, const std::optional<Bounds>& arena)
    : arena_(arena) {
    for (const Obstacle& o : obstacles) {
        if (o.kind == ObstacleKind::static_segment) {
            segments_.emplace_back(o.center, o.end);
        } else {
            cx_.push_back(o.center.x);
            cy_.push_back(o.center.y);
            radius_.push_back(o.radius);
        }
    }
    if (arena) {
        for (const Obstacle& wall : arena->walls()) segments_.emplace_back(wall.center, wall.end);
    }
}

ObstacleField::ObstacleField(const WorldState& world) : ObstacleField(world.obstacles, world.arena) {}

double ObstacleField::ray(Vec2 origin, Vec2 dir, double max_t) const {
    double best = simd::active_kernels().ray_discs(origin.x, origin.y, dir.x, dir.y, cx_.data(),
                                                   cy_.data(), radius_.data(), cx_.size(), max_t);
    for (const auto& [a, b] : segments_) {
        const double t = ray_segment(origin, dir, a, b);
        if (t >= 0.0 && t < best) best = t;
    }
    return best;
}

bool ObstacleField::blocked(Vec2 p) const {
    if (arena_ && !arena_->contains(p)) return true;
    for (std::size_t j = 0; j < cx_.size(); ++j) {
        const double dx = p.x - cx_[j];
        const double dy = p.y - cy_[j];
        if (dx * dx + dy * dy < radius_[j] * radius_[j]) return true;
    }
    return false;
}

double ray_angle(const SensorParams& sensor, int i) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (sensor.fov >= two_pi - 1e-12) return -std::numbers::pi + two_pi * i / sensor.rays;
    return -sensor.fov / 2.0 + sensor.fov * i / (sensor.rays - 1);
}

ScanObservation sense(const WorldState& world) {
    const SensorParams& sensor = world.params.sensor;
    if (sensor.rays < 8) throw std::invalid_argument("sense: at least 8 rays required");
    const ObstacleField field(world);
    ScanObservation scan;
    scan.max_range = sensor.max_range;
    scan.ranges.resize(static_cast<std::size_t>(sensor.rays));
    const Vec2 origin = world.robot.position();
    for (int i = 0; i < sensor.rays; ++i) {
        const double a = world.robot.theta + ray_angle(sensor, i);
        const double r = field.ray(origin, {std::cos(a), std::sin(a)}, sensor.max_range);
        scan.ranges[static_cast<std::size_t>(i)] = std::max(r, kMinRange);
    }
    return scan;
}

}  // namespace cnav
