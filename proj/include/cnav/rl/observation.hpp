#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cnav/corridor/safe_corridor.hpp"
#include "cnav/dwa/dwa_planner.hpp"
#include "cnav/world/sensing.hpp"

namespace cnav::rl {

/// Scaling constants of the observation vector. Every feature is mapped into
/// [-1, 1] and clamped.
struct ObservationConfig {
    int candidate_slots{5};
    double goal_distance_scale{10.0};  ///< m; distances at or beyond map to +1
    double clearance_scale{3.5};       ///< m; matches the sensing range
    double half_width_max{1.5};        ///< m; corridor half width used for scaling
    double objective_scale{2.7};       ///< sum of the objective weights
    int scan_rays{24};                 ///< scan-only layout: number of rays kept
};

inline constexpr std::size_t kCandidateFeatures = 5;
inline constexpr std::size_t kCorridorFeatures = 4;
inline constexpr std::size_t kRobotFeatures = 4;

/// (v, w, objective, clearance, endpoint-to-goal distance).
std::array<double, kCandidateFeatures> candidate_features(const dwa::CandidateTrajectory& c, Vec2 goal,
                                                          const RobotLimits& limits, const ObservationConfig& cfg);

/// (inside flag, signed margin, width of first section, width of last
/// section). An empty corridor yields (0, -1, -1, -1).
std::array<double, kCorridorFeatures> corridor_features(const corridor::SafeCorridor& corridor, Vec2 robot,
                                                        const ObservationConfig& cfg);

/// (v, w, goal distance, heading error to the goal / pi).
std::array<double, kRobotFeatures> robot_features(const RobotState& robot, Vec2 goal, const RobotLimits& limits,
                                                  const ObservationConfig& cfg);

std::size_t planner_observation_size(const ObservationConfig& cfg);
std::size_t scan_observation_size(const ObservationConfig& cfg);

/// Candidate slots (top candidates by objective, padded with the best),
/// corridor block, robot block. `corridor` may be null (block zeroed).
/// A null or empty plan yields an all-zero vector.
std::vector<double> build_observation(const dwa::Plan* plan, const corridor::SafeCorridor* corridor,
                                      const RobotState& robot, Vec2 goal, const RobotLimits& limits,
                                      const ObservationConfig& cfg);

/// Scan-only layout: evenly downsampled ranges followed by the robot block.
std::vector<double> build_scan_observation(const ScanObservation& scan, const RobotState& robot, Vec2 goal,
                                           const RobotLimits& limits, const ObservationConfig& cfg);

}  // namespace cnav::rl
