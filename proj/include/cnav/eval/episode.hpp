#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cnav/corridor/safe_corridor.hpp"
#include "cnav/dwa/dwa_planner.hpp"
#include "cnav/reward/reward.hpp"
#include "cnav/rl/observation.hpp"
#include "cnav/rl/replay_buffer.hpp"
#include "cnav/rl/td3.hpp"

namespace cnav::eval {

/// safemove: planner candidates + corridor features and reward.
/// drl_dwa:  planner candidates only; corridor features zeroed, reward term off.
/// drl:      downsampled range scan only; no planner, no corridor.
enum class Variant { safemove, drl_dwa, drl };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Where the corridor reward measures travelled distance from.
enum class CorridorOrigin { episode_start, decision_start };

std::string_view to_string(CorridorOrigin o);
CorridorOrigin corridor_origin_from_string(std::string_view name);

struct PipelineConfig {
    Variant variant{Variant::safemove};
    dwa::Params dwa;
    corridor::Params corridor;
    reward::CorridorMode reward_mode{reward::CorridorMode::intent};
    CorridorOrigin corridor_origin{CorridorOrigin::episode_start};
    rl::ObservationConfig observation;
    double sim_dt{0.05};
    int substeps{4};  ///< simulation steps per decision

    bool uses_planner() const { return variant != Variant::drl; }
    bool uses_corridor() const { return variant == Variant::safemove; }
    std::size_t observation_size() const;
};

enum class Mode { train, eval };
enum class Outcome { success, collision, timeout };

std::string_view to_string(Outcome o);

/// Everything a policy may look at when choosing an action.
struct DecisionContext {
    const WorldState& world;
    const std::vector<double>& observation;
    const dwa::Plan* plan;                  ///< null when planning failed or is unused
    const corridor::SafeCorridor* corridor; ///< null when unused
    std::mt19937_64& rng;
    Mode mode;
};

/// Policies must be safe to call concurrently from several episodes.
using Policy = std::function<rl::ActionChoice(const DecisionContext&)>;

struct DecisionRecord {
    int index{0};
    double time{0.0};
    rl::ActionChoice action;
    reward::RewardBreakdown reward;
    const dwa::Plan* plan{nullptr};
    const corridor::SafeCorridor* corridor{nullptr};
    bool planning_failed{false};
};

/// Optional callbacks; any may be empty.
struct EpisodeHooks {
    std::function<void(const WorldState&, const Events&)> on_sim_step;
    std::function<void(const DecisionRecord&)> on_decision;
    /// Train mode only: receives every transition.
    std::function<void(rl::Transition&&)> on_transition;
};

struct EpisodeResult {
    Outcome outcome{Outcome::timeout};
    double path_length{0.0};
    double sim_time{0.0};
    double wall_time{0.0};
    double avg_speed{0.0};     ///< path_length / sim_time, 0 when sim_time is 0
    double total_reward{0.0};
    int decisions{0};
    int planning_failures{0};
};

/// Runs one episode until collision, goal or timeout. Each decision: plan,
/// corridor on the best candidate, observation, action, `substeps` world
/// steps, reward.
EpisodeResult run_episode(WorldState world, const Policy& policy, Mode mode, const PipelineConfig& cfg,
                          std::mt19937_64& policy_rng, const EpisodeHooks& hooks = {}, std::int64_t episode_id = 0);

/// Actions are mapped with the world's robot limits.
/// Greedy actor with optional exploration noise (train mode only).
Policy actor_policy(nn::Mlp actor, double explore_sigma);
/// Executes the planner's best candidate; stops when planning failed.
Policy dwa_policy();
/// Uniform random actions over [-1, 1]^2.
Policy random_policy();

}  // namespace cnav::eval
