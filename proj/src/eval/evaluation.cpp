#include "cnav/eval/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "cnav/eval/trainer.hpp"

namespace cnav::eval {
namespace {

constexpr std::uint64_t kEvalWorldStream = 2;
constexpr std::uint64_t kEvalPolicyStream = 3;

}  // namespace

EvalRequest eval_request(const config::RunConfig& cfg, std::uint64_t seed) {
    EvalRequest r;
    r.scenario = cfg.scenario;
    r.world = cfg.world;
    r.pipeline = cfg.pipeline;
    r.episodes = cfg.evaluation.episodes;
    r.seed = seed;
    r.workers = cfg.evaluation.workers;
    return r;
}

std::vector<EpisodeResult> evaluate(const Policy& policy, const EvalRequest& request, const HooksFactory& hooks) {
    std::vector<EpisodeResult> results(static_cast<std::size_t>(std::max(request.episodes, 0)));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto work = [&] {
        for (int i = next++; i < request.episodes; i = next++) {
            try {
                const auto index = static_cast<std::uint64_t>(i);
                auto world_rng = derive_rng(request.seed, kEvalWorldStream, index);
                auto policy_rng = derive_rng(request.seed, kEvalPolicyStream, index);
                WorldState world =
                    make_scenario(request.scenario, static_cast<std::size_t>(i), world_rng, request.world);
                const EpisodeHooks h = hooks ? hooks(i) : EpisodeHooks{};
                results[static_cast<std::size_t>(i)] =
                    run_episode(std::move(world), policy, Mode::eval, request.pipeline, policy_rng, h, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = request.episodes;
            }
        }
    };

    const int workers = std::clamp(request.workers, 1, std::max(request.episodes, 1));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<SeedMetrics> run_ablation(Variant variant, const config::RunConfig& base, int train_budget, int eval_n,
                                      const std::vector<std::uint64_t>& seeds) {
    std::vector<SeedMetrics> out;
    for (const std::uint64_t seed : seeds) {
        config::RunConfig cfg = base;
        cfg.pipeline.variant = variant;
        cfg.training.seed = seed;
        cfg.training.episodes = train_budget;
        cfg.evaluation.episodes = eval_n;
        Trainer trainer(cfg);
        while (trainer.episode() < train_budget) trainer.train_episode();
        const Policy policy = actor_policy(trainer.agent().actor(), 0.0);
        const auto results = evaluate(policy, eval_request(cfg, seed));
        out.push_back({seed, compute_metrics(results)});
    }
    return out;
}

std::vector<SeedMetrics> run_baseline_dwa(const config::RunConfig& base, int eval_n,
                                          const std::vector<std::uint64_t>& seeds) {
    std::vector<SeedMetrics> out;
    config::RunConfig cfg = base;
    cfg.pipeline.variant = Variant::drl_dwa;  // planner on, corridor off
    cfg.evaluation.episodes = eval_n;
    const Policy policy = dwa_policy();
    for (const std::uint64_t seed : seeds) {
        const auto results = evaluate(policy, eval_request(cfg, seed));
        out.push_back({seed, compute_metrics(results)});
    }
    return out;
}

}  // namespace cnav::eval
