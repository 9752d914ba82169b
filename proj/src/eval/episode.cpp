#include "cnav/eval/episode.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

#include "cnav/world/sensing.hpp"

namespace cnav::eval {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::safemove: return "safemove";
        case Variant::drl_dwa: return "drl_dwa";
        case Variant::drl: return "drl";
    }
    return "?";
}

Variant variant_from_string(std::string_view name) {
    if (name == "safemove") return Variant::safemove;
    if (name == "drl_dwa") return Variant::drl_dwa;
    if (name == "drl") return Variant::drl;
    throw std::invalid_argument("unknown variant: " + std::string(name));
}

std::string_view to_string(CorridorOrigin o) {
    return o == CorridorOrigin::episode_start ? "episode_start" : "decision_start";
}

CorridorOrigin corridor_origin_from_string(std::string_view name) {
    if (name == "episode_start") return CorridorOrigin::episode_start;
    if (name == "decision_start") return CorridorOrigin::decision_start;
    throw std::invalid_argument("unknown corridor origin: " + std::string(name));
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::success: return "success";
        case Outcome::collision: return "collision";
        case Outcome::timeout: return "timeout";
    }
    return "?";
}

std::size_t PipelineConfig::observation_size() const {
    return uses_planner() ? rl::planner_observation_size(observation) : rl::scan_observation_size(observation);
}

namespace {

// Planner output and observation for the current state.
struct Perception {
    std::optional<dwa::Plan> plan;
    std::optional<corridor::SafeCorridor> corridor;
    std::vector<double> observation;
    bool planning_failed{false};
};

Perception perceive(const WorldState& world, const PipelineConfig& cfg) {
    Perception p;
    const RobotLimits& limits = world.params.limits;
    if (!cfg.uses_planner()) {
        p.observation = rl::build_scan_observation(sense(world), world.robot, world.goal, limits, cfg.observation);
        return p;
    }
    try {
        p.plan = dwa::plan(world, cfg.dwa);
    } catch (const dwa::NoAdmissibleVelocity&) {
        p.planning_failed = true;
    }
    if (p.plan && cfg.uses_corridor()) {
        try {
            p.corridor = corridor::build_corridor(p.plan->best(), world, cfg.corridor, cfg.dwa.rollout_dt);
        } catch (const corridor::CorridorError&) {
            p.corridor = corridor::SafeCorridor{};
        }
    }
    p.observation = rl::build_observation(p.plan ? &*p.plan : nullptr, p.corridor ? &*p.corridor : nullptr,
                                          world.robot, world.goal, limits, cfg.observation);
    return p;
}

Outcome classify(const Events& e) {
    if (e.collision) return Outcome::collision;
    if (e.goal_reached) return Outcome::success;
    return Outcome::timeout;
}

}  // namespace

EpisodeResult run_episode(WorldState world, const Policy& policy, Mode mode, const PipelineConfig& cfg,
                          std::mt19937_64& policy_rng, const EpisodeHooks& hooks, std::int64_t episode_id) {
    if (cfg.substeps < 1 || !(cfg.sim_dt > 0.0)) throw std::invalid_argument("run_episode: bad step settings");
    const auto wall_start = std::chrono::steady_clock::now();
    EpisodeResult result;
    const double t0 = world.time;

    Events events = detect_events(world);
    if (hooks.on_sim_step) hooks.on_sim_step(world, events);

    Perception current;
    if (!events.any()) current = perceive(world, cfg);

    while (!events.any()) {
        const Vec2 decision_start = world.robot.position();
        const DecisionContext ctx{world, current.observation, current.plan ? &*current.plan : nullptr,
                                  current.corridor ? &*current.corridor : nullptr, policy_rng, mode};
        rl::ActionChoice action;
        if (current.planning_failed) {
            action.command = {world.params.limits.v_min, 0.0};
            action.normalized = rl::to_normalized(action.command, world.params.limits);
            ++result.planning_failures;
        } else {
            action = policy(ctx);
        }

        for (int s = 0; s < cfg.substeps && !events.any(); ++s) {
            const Vec2 before = world.robot.position();
            events = step_world_inplace(world, action.command, cfg.sim_dt);
            result.path_length += distance(before, world.robot.position());
            if (hooks.on_sim_step) hooks.on_sim_step(world, events);
        }

        const corridor::SafeCorridor* corridor = current.corridor ? &*current.corridor : nullptr;
        const Vec2 origin = cfg.corridor_origin == CorridorOrigin::episode_start ? world.start : decision_start;
        const reward::RewardBreakdown r =
            reward::total_reward(world.robot, world, world.goal, origin, corridor, cfg.reward_mode);
        result.total_reward += r.r_total;

        if (hooks.on_decision) {
            DecisionRecord rec{result.decisions, world.time, action, r, current.plan ? &*current.plan : nullptr,
                               corridor, current.planning_failed};
            hooks.on_decision(rec);
        }

        const bool learning = mode == Mode::train && static_cast<bool>(hooks.on_transition);
        Perception next;
        if (!events.any() || learning) next = perceive(world, cfg);
        if (learning) {
            rl::Transition t;
            t.obs = current.observation;
            t.action = action.normalized;
            t.reward = r.r_total;
            t.next_obs = next.observation;
            t.done = events.collision || events.goal_reached;
            t.episode_id = episode_id;
            t.step_idx = result.decisions;
            hooks.on_transition(std::move(t));
        }
        ++result.decisions;
        current = std::move(next);
    }

    result.outcome = classify(events);
    result.sim_time = world.time - t0;
    result.avg_speed = result.sim_time > 0.0 ? result.path_length / result.sim_time : 0.0;
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

Policy actor_policy(nn::Mlp actor, double explore_sigma) {
    auto net = std::make_shared<const nn::Mlp>(std::move(actor));
    return [net, explore_sigma](const DecisionContext& ctx) {
        const double sigma = ctx.mode == Mode::train ? explore_sigma : 0.0;
        return rl::select_action(*net, ctx.observation, sigma, ctx.rng, ctx.world.params.limits);
    };
}

Policy dwa_policy() {
    return [](const DecisionContext& ctx) {
        rl::ActionChoice a;
        const RobotLimits& limits = ctx.world.params.limits;
        a.command = ctx.plan != nullptr ? VelocityCommand{ctx.plan->best().v, ctx.plan->best().w}
                                        : VelocityCommand{limits.v_min, 0.0};
        a.command = clip_command(a.command, limits);
        a.normalized = rl::to_normalized(a.command, limits);
        return a;
    };
}

Policy random_policy() {
    return [](const DecisionContext& ctx) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double a0 = u(ctx.rng);
        const double a1 = u(ctx.rng);
        return rl::perturb_action({a0, a1}, {0.0, 0.0}, ctx.world.params.limits);
    };
}

}  // namespace cnav::eval
