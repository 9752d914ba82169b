#include "cnav/world/orca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnav {
namespace {

constexpr double kEpsilon = 1e-9;

Vec2 normalized(Vec2 v) { return v / norm(v); }

// One-dimensional program along line `index`, subject to the earlier lines
// and the speed disc. Returns false when the line is infeasible.
bool program_on_line(std::span<const OrcaLine> lines, std::size_t index, double radius,
                     Vec2 opt, bool direction_opt, Vec2& result) {
    const OrcaLine& line = lines[index];
    const double dot_product = dot(line.point, line.direction);
    const double discriminant = dot_product * dot_product + radius * radius - norm_sq(line.point);
    if (discriminant < 0.0) return false;

    const double sqrt_disc = std::sqrt(discriminant);
    double t_left = -dot_product - sqrt_disc;
    double t_right = -dot_product + sqrt_disc;

    for (std::size_t i = 0; i < index; ++i) {
        const double denominator = cross(line.direction, lines[i].direction);
        const double numerator = cross(lines[i].direction, line.point - lines[i].point);
        if (std::abs(denominator) <= kEpsilon) {
            if (numerator < 0.0) return false;
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    if (direction_opt) {
        result = dot(opt, line.direction) > 0.0 ? line.point + t_right * line.direction
                                                : line.point + t_left * line.direction;
    } else {
        const double t = std::clamp(dot(line.direction, opt - line.point), t_left, t_right);
        result = line.point + t * line.direction;
    }
    return true;
}

// Two-dimensional program; returns the index of the first failing line, or
// lines.size() on success.
std::size_t program_2d(std::span<const OrcaLine> lines, double radius, Vec2 opt, bool direction_opt,
                       Vec2& result) {
    if (direction_opt) {
        result = opt * radius;
    } else if (norm_sq(opt) > radius * radius) {
        result = normalized(opt) * radius;
    } else {
        result = opt;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (cross(lines[i].direction, lines[i].point - result) > 0.0) {
            const Vec2 previous = result;
            if (!program_on_line(lines, i, radius, opt, direction_opt, result)) {
                result = previous;
                return i;
            }
        }
    }
    return lines.size();
}

// Infeasible fallback: minimise the largest constraint violation.
void program_3d(std::span<const OrcaLine> lines, std::size_t begin, double radius, Vec2& result) {
    double distance = 0.0;
    for (std::size_t i = begin; i < lines.size(); ++i) {
        if (cross(lines[i].direction, lines[i].point - result) <= distance) continue;

        std::vector<OrcaLine> projected;
        projected.reserve(i);
        for (std::size_t j = 0; j < i; ++j) {
            OrcaLine line;
            const double determinant = cross(lines[i].direction, lines[j].direction);
            if (std::abs(determinant) <= kEpsilon) {
                if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
                line.point = 0.5 * (lines[i].point + lines[j].point);
            } else {
                line.point = lines[i].point +
                             (cross(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                                 lines[i].direction;
            }
            line.direction = normalized(lines[j].direction - lines[i].direction);
            projected.push_back(line);
        }

        const Vec2 previous = result;
        if (program_2d(projected, radius, perp(lines[i].direction), true, result) < projected.size()) {
            // Numerical corner case: keep the previous point.
            result = previous;
        }
        distance = cross(lines[i].direction, lines[i].point - result);
    }
}

}  // namespace

OrcaLine orca_half_plane(const OrcaBody& self, const OrcaBody& other, double time_horizon, double dt) {
    const Vec2 rel_pos = other.position - self.position;
    const Vec2 rel_vel = self.velocity - other.velocity;
    const double dist_sq = norm_sq(rel_pos);
    const double combined_radius = self.radius + other.radius;
    const double combined_sq = combined_radius * combined_radius;
    const double inv_horizon = 1.0 / time_horizon;

    OrcaLine line;
    Vec2 u;
    if (dist_sq > combined_sq) {
        const Vec2 w = rel_vel - inv_horizon * rel_pos;
        const double w_len_sq = norm_sq(w);
        const double dot_product = dot(w, rel_pos);
        if (dot_product < 0.0 && dot_product * dot_product > combined_sq * w_len_sq) {
            // Closest boundary point lies on the cut-off circle.
            const double w_len = std::sqrt(w_len_sq);
            const Vec2 unit_w = w / w_len;
            line.direction = {unit_w.y, -unit_w.x};
            u = (combined_radius * inv_horizon - w_len) * unit_w;
        } else {
            const double leg = std::sqrt(dist_sq - combined_sq);
            if (cross(rel_pos, w) > 0.0) {
                line.direction = Vec2{rel_pos.x * leg - rel_pos.y * combined_radius,
                                      rel_pos.x * combined_radius + rel_pos.y * leg} /
                                 dist_sq;
            } else {
                line.direction = -Vec2{rel_pos.x * leg + rel_pos.y * combined_radius,
                                       -rel_pos.x * combined_radius + rel_pos.y * leg} /
                                 dist_sq;
            }
            u = dot(rel_vel, line.direction) * line.direction - rel_vel;
        }
    } else {
        // Already overlapping: resolve within one time step.
        const double inv_dt = 1.0 / dt;
        Vec2 w = rel_vel - inv_dt * rel_pos;
        double w_len = norm(w);
        if (w_len < kEpsilon) {
            w = -rel_pos;
            w_len = norm(w);
            if (w_len < kEpsilon) {
                w = {1.0, 0.0};
                w_len = 1.0;
            }
        }
        const Vec2 unit_w = w / w_len;
        line.direction = {unit_w.y, -unit_w.x};
        u = (combined_radius * inv_dt - w_len) * unit_w;
    }
    line.point = self.velocity + other.responsibility * u;
    return line;
}

Vec2 solve_orca_program(std::span<const OrcaLine> lines, double max_speed, Vec2 pref_vel) {
    Vec2 result;
    const std::size_t failed = program_2d(lines, max_speed, pref_vel, false, result);
    if (failed < lines.size()) program_3d(lines, failed, max_speed, result);
    return result;
}

Vec2 orca_velocity(const OrcaBody& self, double max_speed, std::span<const OrcaBody> others,
                   Vec2 pref_vel, double time_horizon, double dt) {
    if (!(time_horizon > 0.0)) throw std::invalid_argument("orca_velocity: time_horizon must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("orca_velocity: dt must be positive");
    std::vector<OrcaLine> lines;
    lines.reserve(others.size());
    for (const OrcaBody& other : others) lines.push_back(orca_half_plane(self, other, time_horizon, dt));
    return solve_orca_program(lines, max_speed, pref_vel);
}

OrcaBody as_orca_body(const Obstacle& agent, const Obstacle& neighbor, double reciprocity) {
    switch (neighbor.kind) {
        case ObstacleKind::dynamic_agent:
            return {neighbor.center, neighbor.velocity, neighbor.radius, reciprocity};
        case ObstacleKind::static_disc:
            return {neighbor.center, {}, neighbor.radius, 1.0};
        case ObstacleKind::static_segment:
            return {closest_point_on_segment(agent.center, neighbor.center, neighbor.end), {}, 0.0, 1.0};
    }
    return {};
}

Vec2 orca_velocity(const Obstacle& agent, std::span<const Obstacle> neighbors, Vec2 pref_vel,
                   double time_horizon, double dt, double reciprocity) {
    if (!agent.is_dynamic()) throw std::invalid_argument("orca_velocity: agent must be dynamic");
    const OrcaBody self{agent.center, agent.velocity, agent.radius, 1.0};
    std::vector<OrcaBody> bodies;
    bodies.reserve(neighbors.size());
    for (const Obstacle& n : neighbors) bodies.push_back(as_orca_body(agent, n, reciprocity));
    return orca_velocity(self, agent.pref_speed, bodies, pref_vel, time_horizon, dt);
}

}  // namespace cnav
