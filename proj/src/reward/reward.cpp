#include "cnav/reward/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cnav::reward {

std::string_view to_string(CorridorMode mode) { return mode == CorridorMode::literal ? "literal" : "intent"; }

CorridorMode corridor_mode_from_string(std::string_view name) {
    if (name == "literal") return CorridorMode::literal;
    if (name == "intent") return CorridorMode::intent;
    throw std::invalid_argument("unknown corridor reward mode: " + std::string(name));
}

double dis(Vec2 a, Vec2 b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)); }

double goal_reward(const RobotState& robot, Vec2 goal) {
    if (dis(robot.position(), goal) < kGoalRadius) return kGoalReward;
    return std::abs(robot.v - robot.w);
}

double collision_reward(const RobotState& robot, const WorldState& world) {
    const double d = min_obstacle_distance(robot.position(), world.obstacles, world.arena);
    return d <= kCollisionDistance ? kCollisionReward : 0.0;
}

double corridor_reward(const RobotState& robot, Vec2 start, const corridor::SafeCorridor* corridor,
                       CorridorMode mode) {
    if (corridor == nullptr || corridor->empty()) return 0.0;
    const double d = dis(start, robot.position());
    const bool inside = corridor::contains(*corridor, robot.position()).inside;
    if (mode == CorridorMode::literal) return inside ? -kCorridorPenaltyGain * d : kCorridorBonusGain * d;
    return inside ? kCorridorBonusGain * d : -kCorridorPenaltyGain * d;
}

RewardBreakdown total_reward(const RobotState& robot, const WorldState& world, Vec2 goal, Vec2 start,
                             const corridor::SafeCorridor* corridor, CorridorMode mode) {
    RewardBreakdown r;
    r.r_goal = goal_reward(robot, goal);
    r.r_collision = collision_reward(robot, world);
    r.r_corridor = corridor_reward(robot, start, corridor, mode);
    r.r_total = r.r_goal + r.r_collision + r.r_corridor;
    return r;
}

}  // namespace cnav::reward
