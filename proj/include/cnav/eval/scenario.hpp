#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cnav/world/world.hpp"

namespace cnav::eval {

/// Thrown when obstacles cannot be placed within the sampling budget.
struct ArenaTooDense : std::runtime_error {
    ArenaTooDense() : std::runtime_error("arena too dense") {}
};

/// Seeded-random dynamic obstacle scenario: start near the south edge,
/// goals on an arc of bearings in front of it.
struct ScenarioSpec {
    int obstacle_count{8};
    double arena_side{10.0};
    double start_offset{0.8};              ///< start distance from the south wall
    double goal_distance{7.5};
    std::vector<double> goal_bearings_deg{60.0, 80.0, 100.0, 120.0};
    double speed_min{0.5};
    double speed_max{1.0};
    double obstacle_radius{0.2};
    double min_clearance{0.5};             ///< surface to surface, between obstacles
    double endpoint_clearance{1.0};        ///< obstacle surface to start and goals
    int max_attempts{10000};

    Vec2 start() const { return {0.0, -arena_side / 2 + start_offset}; }
    Vec2 goal(std::size_t index) const;
    std::size_t goal_count() const { return goal_bearings_deg.size(); }
    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

/// Builds the world for goal `goal_index` (mod goal_count). Obstacle
/// positions, speeds, waypoints and the world's own RNG stream are all drawn
/// from `rng`. Throws ArenaTooDense after max_attempts rejected samples.
WorldState make_scenario(const ScenarioSpec& spec, std::size_t goal_index, std::mt19937_64& rng,
                         const WorldParams& params = {});

/// Independent stream for (seed, stream, index), stable across platforms.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace cnav::eval
