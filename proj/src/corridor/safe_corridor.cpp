#include "cnav/corridor/safe_corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cnav/corridor/convex_hull.hpp"

namespace cnav::corridor {

namespace {
constexpr double kBoundaryTolerance = 1e-9;
}  // namespace

ReferenceTrajectory reference_points(const dwa::CandidateTrajectory& traj, int k, double rollout_dt) {
    if (k < 2) throw std::invalid_argument("reference_points: K must be at least 2");
    if (traj.poses.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("reference_points: trajectory has fewer poses than K");
    }
    const double horizon = static_cast<double>(traj.poses.size() - 1) * rollout_dt;
    if (std::abs(traj.v) * horizon < 1e-9) {
        throw CorridorError(CorridorError::Kind::no_corridor, "no corridor");
    }
    const RobotState& origin = traj.poses.front();
    const VelocityCommand cmd{traj.v, traj.w};

    ReferenceTrajectory ref;
    ref.t0 = 0.0;
    ref.tm = horizon;
    for (int i = 0; i < k; ++i) {
        const double t = horizon * i / (k - 1);
        const RobotState s = t > 0.0 ? step_robot(origin, cmd, t) : origin;
        ref.points.push_back(s.position());
        ref.velocities.push_back({traj.v * std::cos(s.theta), traj.v * std::sin(s.theta)});
    }
    return ref;
}

Vec2 normal_direction(Vec2 velocity) {
    const double len = norm(velocity);
    if (len <= 1e-9) throw CorridorError(CorridorError::Kind::undefined_normal, "undefined normal");
    return velocity / len;
}

std::array<Vec2, 2> boundary_points(Vec2 anchor, Vec2 n, const ObstacleField& field, double half_width_max) {
    if (field.blocked(anchor)) throw CorridorError(CorridorError::Kind::anchor_infeasible, "anchor infeasible");
    const Vec2 left = perp(n);
    const double reach_left = field.ray(anchor, left, half_width_max);
    const double reach_right = field.ray(anchor, -left, half_width_max);
    return {anchor + left * reach_left, anchor - left * reach_right};
}

std::array<Vec2, 2> boundary_points(Vec2 anchor, Vec2 n, const WorldState& world, double half_width_max) {
    return boundary_points(anchor, n, ObstacleField(world), half_width_max);
}

SafeCorridor build_corridor(const dwa::CandidateTrajectory& traj, const WorldState& world, const Params& params,
                            double rollout_dt) {
    const ReferenceTrajectory ref = reference_points(traj, params.sections, rollout_dt);
    const ObstacleField field(world);

    SafeCorridor corridor;
    std::optional<Vec2> previous_n;
    for (std::size_t k = 0; k < ref.points.size(); ++k) {
        NormalSection section;
        section.anchor = ref.points[k];
        try {
            section.n = normal_direction(ref.velocities[k]);
        } catch (const CorridorError&) {
            if (!previous_n) break;
            section.n = *previous_n;
        }
        previous_n = section.n;
        try {
            section.boundary_points = boundary_points(section.anchor, section.n, field, params.half_width_max);
        } catch (const CorridorError&) {
            break;
        }
        corridor.sections.push_back(section);
    }

    for (std::size_t k = 0; k + 1 < corridor.sections.size(); ++k) {
        const NormalSection& a = corridor.sections[k];
        const NormalSection& b = corridor.sections[k + 1];
        const std::array<Vec2, 6> pts{a.boundary_points[0], a.anchor, a.boundary_points[1],
                                      b.boundary_points[0], b.anchor, b.boundary_points[1]};
        try {
            corridor.polygons.push_back(convex_hull(pts));
        } catch (const DegenerateHull&) {
            corridor.sections.resize(k + 1);
            break;
        }
    }
    return corridor;
}

double signed_distance(std::span<const Vec2> polygon, Vec2 p) {
    bool inside = true;
    double inner = std::numeric_limits<double>::infinity();
    double outer = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % polygon.size()];
        const Vec2 edge = b - a;
        const double side = cross(edge, p - a) / norm(edge);
        if (side < 0.0) inside = false;
        inner = std::min(inner, side);
        outer = std::min(outer, distance(p, closest_point_on_segment(p, a, b)));
    }
    return inside ? inner : -outer;
}

Membership contains(const SafeCorridor& corridor, Vec2 p) {
    Membership m;
    m.margin = -std::numeric_limits<double>::infinity();
    for (const auto& poly : corridor.polygons) m.margin = std::max(m.margin, signed_distance(poly, p));
    // Section lines are polygon edges, so anchors sit on the boundary.
    m.inside = m.margin >= -kBoundaryTolerance;
    return m;
}

}  // namespace cnav::corridor
