#include "cnav/rl/observation.hpp"

#include <algorithm>
#include <cmath>

namespace cnav::rl {
namespace {

double unit(double x) { return std::clamp(x, -1.0, 1.0); }

// [0, scale] -> [-1, 1]
double from_range(double x, double scale) { return unit(2.0 * std::min(x, scale) / scale - 1.0); }

}  // namespace

std::array<double, kCandidateFeatures> candidate_features(const dwa::CandidateTrajectory& c, Vec2 goal,
                                                          const RobotLimits& limits, const ObservationConfig& cfg) {
    const double v_span = limits.v_max - limits.v_min;
    return {unit(2.0 * (c.v - limits.v_min) / v_span - 1.0), unit(c.w / limits.w_max),
            unit(c.total_cost / cfg.objective_scale), from_range(std::max(c.dist_obst_score, 0.0), cfg.clearance_scale),
            from_range(distance(c.poses.back().position(), goal), cfg.goal_distance_scale)};
}

std::array<double, kCorridorFeatures> corridor_features(const corridor::SafeCorridor& corridor, Vec2 robot,
                                                        const ObservationConfig& cfg) {
    if (corridor.empty()) return {0.0, -1.0, -1.0, -1.0};
    const corridor::Membership m = corridor::contains(corridor, robot);
    const double hw = cfg.half_width_max;
    return {m.inside ? 1.0 : 0.0, unit(m.margin / hw), unit(corridor.sections.front().width() / hw - 1.0),
            unit(corridor.sections.back().width() / hw - 1.0)};
}

std::array<double, kRobotFeatures> robot_features(const RobotState& robot, Vec2 goal, const RobotLimits& limits,
                                                  const ObservationConfig& cfg) {
    const Vec2 to_goal = goal - robot.position();
    const double bearing_error = wrap_angle(std::atan2(to_goal.y, to_goal.x) - robot.theta);
    const double v_span = limits.v_max - limits.v_min;
    return {unit(2.0 * (robot.v - limits.v_min) / v_span - 1.0), unit(robot.w / limits.w_max),
            from_range(norm(to_goal), cfg.goal_distance_scale), unit(bearing_error / std::numbers::pi)};
}

std::size_t planner_observation_size(const ObservationConfig& cfg) {
    return static_cast<std::size_t>(cfg.candidate_slots) * kCandidateFeatures + kCorridorFeatures + kRobotFeatures;
}

std::size_t scan_observation_size(const ObservationConfig& cfg) {
    return static_cast<std::size_t>(cfg.scan_rays) + kRobotFeatures;
}

std::vector<double> build_observation(const dwa::Plan* plan, const corridor::SafeCorridor* corridor,
                                      const RobotState& robot, Vec2 goal, const RobotLimits& limits,
                                      const ObservationConfig& cfg) {
    std::vector<double> obs(planner_observation_size(cfg), 0.0);
    if (plan == nullptr || plan->ranking.empty()) return obs;

    auto out = obs.begin();
    for (int slot = 0; slot < cfg.candidate_slots; ++slot) {
        const std::size_t rank = static_cast<std::size_t>(slot) < plan->ranking.size() ? static_cast<std::size_t>(slot) : 0;
        const auto f = candidate_features(plan->candidates[plan->ranking[rank]], goal, limits, cfg);
        out = std::copy(f.begin(), f.end(), out);
    }
    if (corridor != nullptr) {
        const auto f = corridor_features(*corridor, robot.position(), cfg);
        std::copy(f.begin(), f.end(), out);
    }
    out += kCorridorFeatures;
    const auto r = robot_features(robot, goal, limits, cfg);
    std::copy(r.begin(), r.end(), out);
    return obs;
}

std::vector<double> build_scan_observation(const ScanObservation& scan, const RobotState& robot, Vec2 goal,
                                           const RobotLimits& limits, const ObservationConfig& cfg) {
    std::vector<double> obs;
    obs.reserve(scan_observation_size(cfg));
    const std::size_t n = scan.ranges.size();
    for (int i = 0; i < cfg.scan_rays; ++i) {
        const std::size_t src = static_cast<std::size_t>(i) * n / static_cast<std::size_t>(cfg.scan_rays);
        obs.push_back(from_range(scan.ranges[src], scan.max_range));
    }
    const auto r = robot_features(robot, goal, limits, cfg);
    obs.insert(obs.end(), r.begin(), r.end());
    return obs;
}

}  // namespace cnav::rl
