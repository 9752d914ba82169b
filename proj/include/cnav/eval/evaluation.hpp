#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cnav/config/run_config.hpp"
#include "cnav/eval/episode.hpp"
#include "cnav/eval/metrics.hpp"
#include "cnav/eval/scenario.hpp"

namespace cnav::eval {

/// Evaluation episode i uses goal i mod goal_count and world and policy
/// streams derived from (seed, i), independent of the worker count.
struct EvalRequest {
    ScenarioSpec scenario;
    WorldParams world;
    PipelineConfig pipeline;
    int episodes{40};
    std::uint64_t seed{1};
    int workers{1};
};

EvalRequest eval_request(const config::RunConfig& cfg, std::uint64_t seed);

/// Per-episode hooks factory; called from worker threads.
using HooksFactory = std::function<EpisodeHooks(int episode)>;

/// Results in episode order. `policy` must be safe for concurrent calls.
std::vector<EpisodeResult> evaluate(const Policy& policy, const EvalRequest& request,
                                    const HooksFactory& hooks = {});

/// Metrics of one (variant, seed) ablation cell.
struct SeedMetrics {
    std::uint64_t seed{0};
    Metrics metrics;
};

/// Trains `variant` for train_budget episodes per seed, then evaluates the
/// greedy actor on eval_n episodes with the same seed.
std::vector<SeedMetrics> run_ablation(Variant variant, const config::RunConfig& base, int train_budget, int eval_n,
                                      const std::vector<std::uint64_t>& seeds);

/// The planner's best candidate executed directly, evaluated like a policy.
std::vector<SeedMetrics> run_baseline_dwa(const config::RunConfig& base, int eval_n,
                                          const std::vector<std::uint64_t>& seeds);

}  // namespace cnav::eval
