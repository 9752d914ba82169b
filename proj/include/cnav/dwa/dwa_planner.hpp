#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cnav/world/world.hpp"

namespace cnav::dwa {

/// Velocity box reachable within one decision period.
struct VelocityWindow {
    double v_min{0.0};
    double v_max{0.0};
    double w_min{0.0};
    double w_max{0.0};
};

struct AccelLimits {
    double v{0.5};  ///< m/s^2
    double w{3.2};  ///< rad/s^2
};

/// Weights of the candidate objective. delta scales the density penalty.
struct Weights {
    double alpha{0.8};  ///< heading
    double beta{1.0};   ///< obstacle clearance
    double gamma{0.3};  ///< speed
    double delta{0.6};  ///< obstacle density
};

struct Params {
    AccelLimits accel;
    double decision_dt{0.2};
    int v_samples{7};
    int w_samples{15};
    int rollout_steps{15};
    double rollout_dt{0.2};
    Weights weights;
    double sensing_range{3.5};   ///< obstacle counting range and clearance clip
    int prefilter_k{10};         ///< keep the K least crowded candidates (plus ties); <= 0 keeps all
    bool literal_eq1{false};     ///< add the density term instead of subtracting it
    double density_cap{1e6};     ///< cost used when a pose coincides with an obstacle
    bool clearance_includes_walls{false};  ///< arena walls count in the clearance term
};

/// One sampled velocity pair with its rollout and objective terms.
struct CandidateTrajectory {
    double v{0.0};
    double w{0.0};
    std::vector<RobotState> poses;  ///< poses[0] is the rollout origin
    double heading_score{0.0};      ///< pi - |heading error| at the final pose
    double dist_obst_score{0.0};    ///< clearance along the rollout, clipped at sensing range
    double vel_score{0.0};
    double density_cost{0.0};       ///< N_obs / avg_distance (weight applied in the objective)
    std::size_t n_obs{0};
    double total_cost{0.0};         ///< objective G; larger is better
};

/// Thrown by select_best on an empty candidate set.
struct NoAdmissibleVelocity : std::runtime_error {
    NoAdmissibleVelocity() : std::runtime_error("no admissible velocity") {}
};

VelocityWindow dynamic_window(const RobotState& state, const AccelLimits& accel, double dt,
                              const RobotLimits& limits);

/// `pose_count` poses under a constant command; the first one is `state`
/// itself carrying the command as its velocity.
std::vector<RobotState> rollout(const RobotState& state, VelocityCommand cmd, int pose_count, double dt);

/// Mean pose-to-obstacle distance over all (pose, obstacle) pairs, or
/// nullopt when there are no obstacles.
std::optional<double> avg_distance(std::span<const Vec2> poses, std::span<const Vec2> obstacles);

/// delta * n_obs / avg_distance; 0 with no obstacles, `cap` when the mean
/// distance vanishes.
double density_cost(std::size_t n_obs, std::optional<double> mean_distance, double delta, double cap);

struct CostTerms {
    double heading{0.0};
    double dist_obst{0.0};
    double vel{0.0};
};

CostTerms cost_terms(const CandidateTrajectory& candidate, std::span<const Obstacle> obstacles,
                     const std::optional<Bounds>& arena, Vec2 goal, double max_range);

/// Builds and scores every term of one candidate (total_cost left at 0).
CandidateTrajectory evaluate_candidate(const RobotState& state, VelocityCommand cmd, const WorldState& world,
                                       const Params& params);

/// Min-max normalises each term over the set, writes G into total_cost and
/// returns the argmax. Ties go to the smaller |w|, then the lower index.
std::size_t select_best(std::span<CandidateTrajectory> candidates, const Weights& weights,
                        bool literal_eq1 = false);

/// Indices (ascending) of the candidates whose in-range obstacle count is at
/// most the k-th smallest count, so candidates tied at the cut are all kept.
/// k <= 0 returns every index.
std::vector<std::size_t> prefilter_by_density(std::span<const CandidateTrajectory> candidates, int k);

struct Plan {
    std::vector<CandidateTrajectory> candidates;  ///< scored survivors of the prefilter
    std::vector<std::size_t> ranking;             ///< indices into candidates, best first
    const CandidateTrajectory& best() const { return candidates[ranking.front()]; }
};

/// Full planning cycle from the robot's current state. Throws
/// NoAdmissibleVelocity if the window yields no candidate.
Plan plan(const WorldState& world, const Params& params);

}  // namespace cnav::dwa
