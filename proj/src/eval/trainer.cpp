#include "cnav/eval/trainer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cnav/eval/scenario.hpp"

namespace cnav::eval {
namespace {

constexpr std::uint64_t kMagic = 0x54504b4356414e43ull;  // "CNAVCKPT"
constexpr std::uint64_t kVersion = 1;
constexpr std::uint64_t kTrainStream = 1;

CheckpointInfo read_info(io::BinaryReader& in) {
    if (in.u64() != kMagic) throw io::FormatError("not a checkpoint file");
    if (in.u64() != kVersion) throw io::FormatError("unsupported checkpoint version");
    CheckpointInfo info;
    info.variant = in.str();
    info.config_hash = in.u64();
    info.config_json = in.str();
    info.episode = static_cast<int>(in.i64());
    return info;
}

}  // namespace

Trainer::Trainer(config::RunConfig cfg)
    : cfg_(std::move(cfg)),
      agent_(cfg_.pipeline.observation_size(), cfg_.td3, cfg_.training.seed),
      buffer_(cfg_.td3.buffer_capacity) {}

Trainer::Trainer(config::RunConfig cfg, rl::Td3Agent agent, rl::SortedReplayBuffer buffer)
    : cfg_(std::move(cfg)), agent_(std::move(agent)), buffer_(std::move(buffer)) {}

CurveRow Trainer::train_episode(const EpisodeHooks& extra) {
    auto world_rng = derive_rng(cfg_.training.seed, kTrainStream, static_cast<std::uint64_t>(episode_));
    WorldState world = make_scenario(cfg_.scenario, static_cast<std::size_t>(episode_), world_rng, cfg_.world);

    const Policy policy = [this](const DecisionContext& ctx) {
        const RobotLimits& limits = ctx.world.params.limits;
        if (steps_ < cfg_.training.warmup_steps) {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const double a0 = u(ctx.rng);
            const double a1 = u(ctx.rng);
            return rl::perturb_action({a0, a1}, {0.0, 0.0}, limits);
        }
        return rl::select_action(agent_.actor(), ctx.observation, cfg_.td3.explore_noise, ctx.rng, limits);
    };

    double loss_sum = 0.0;
    int loss_count = 0;
    EpisodeHooks hooks = extra;
    hooks.on_transition = [&](rl::Transition&& t) {
        if (extra.on_transition) extra.on_transition(rl::Transition(t));
        buffer_.push(std::move(t));
        ++steps_;
        for (int u = 0; u < cfg_.training.updates_per_decision; ++u) {
            rl::CriticLosses l;
            if (!agent_.train_step(buffer_, &l)) break;
            loss_sum += 0.5 * (l.critic1 + l.critic2);
            ++loss_count;
        }
    };

    const EpisodeResult r = run_episode(std::move(world), policy, Mode::train, cfg_.pipeline, agent_.rng(), hooks,
                                        episode_);
    CurveRow row;
    row.episode = episode_;
    row.episode_return = r.total_reward;
    row.outcome = r.outcome;
    row.decisions = r.decisions;
    row.path_length = r.path_length;
    row.sim_time = r.sim_time;
    row.critic_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    row.buffer_size = buffer_.size();
    ++episode_;
    return row;
}

void Trainer::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write checkpoint " + tmp);
        io::BinaryWriter out(f);
        out.u64(kMagic);
        out.u64(kVersion);
        out.str(std::string(to_string(cfg_.pipeline.variant)));
        out.u64(config::config_hash(cfg_));
        out.str(config::to_json(cfg_).dump());
        out.i64(episode_);
        out.i64(steps_);
        agent_.save(out);
        buffer_.save(out);
        if (!f.flush()) throw std::runtime_error("failed writing checkpoint " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Trainer Trainer::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint " + path);
    io::BinaryReader in(f);
    const CheckpointInfo info = read_info(in);
    config::RunConfig cfg = config::from_json(nlohmann::json::parse(info.config_json));
    const std::int64_t steps = in.i64();
    rl::Td3Agent agent = rl::Td3Agent::load(in);
    rl::SortedReplayBuffer buffer = rl::SortedReplayBuffer::load(in);
    if (agent.obs_dim() != cfg.pipeline.observation_size()) {
        throw io::FormatError("checkpoint observation size does not match its variant");
    }
    Trainer t(std::move(cfg), std::move(agent), std::move(buffer));
    t.episode_ = info.episode;
    t.steps_ = steps;
    return t;
}

bool Trainer::operator==(const Trainer& o) const {
    return config::to_json(cfg_) == config::to_json(o.cfg_) && agent_ == o.agent_ &&
           buffer_.ordered_rewards() == o.buffer_.ordered_rewards() && episode_ == o.episode_ && steps_ == o.steps_;
}

CheckpointInfo read_checkpoint_info(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint " + path);
    io::BinaryReader in(f);
    return read_info(in);
}

}  // namespace cnav::eval
