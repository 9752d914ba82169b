#pragma once

#include <optional>
#include <string_view>

#include "cnav/corridor/safe_corridor.hpp"
#include "cnav/world/world.hpp"

namespace cnav::reward {

/// Sign convention of the corridor term.
///  literal: -10 d inside the corridor, +5 d outside.
///  intent:  +5 d inside, -10 d outside.
enum class CorridorMode { literal, intent };

std::string_view to_string(CorridorMode mode);
CorridorMode corridor_mode_from_string(std::string_view name);

inline constexpr double kGoalReward = 100.0;
inline constexpr double kGoalRadius = 0.2;
inline constexpr double kCollisionReward = -10.0;
inline constexpr double kCollisionDistance = 0.1;
inline constexpr double kCorridorPenaltyGain = 10.0;
inline constexpr double kCorridorBonusGain = 5.0;

struct RewardBreakdown {
    double r_goal{0.0};
    double r_collision{0.0};
    double r_corridor{0.0};
    double r_total{0.0};
};

double dis(Vec2 a, Vec2 b);

/// 100 when strictly closer than 0.2 m to the goal, |v - w| otherwise.
double goal_reward(const RobotState& robot, Vec2 goal);

/// -10 when the nearest obstacle surface is at most 0.1 m away.
double collision_reward(const RobotState& robot, const WorldState& world);

/// Corridor term scaled by the distance travelled from `start`. An absent
/// (failed) corridor contributes 0.
double corridor_reward(const RobotState& robot, Vec2 start, const corridor::SafeCorridor* corridor,
                       CorridorMode mode);

RewardBreakdown total_reward(const RobotState& robot, const WorldState& world, Vec2 goal, Vec2 start,
                             const corridor::SafeCorridor* corridor, CorridorMode mode);

}  // namespace cnav::reward
