#include "cnav/rl/td3.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cnav::rl {
namespace {

constexpr std::size_t kActionDim = 2;

std::vector<std::size_t> layout(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

double gaussian(std::mt19937_64& rng, double sigma) {
    if (sigma <= 0.0) return 0.0;
    std::normal_distribution<double> dist(0.0, sigma);
    return dist(rng);
}

}  // namespace

Td3Agent::Td3Agent(std::size_t obs_dim, Td3Config config, std::uint64_t seed)
    : obs_dim_(obs_dim), config_(std::move(config)), rng_(seed) {
    if (obs_dim == 0) throw std::invalid_argument("Td3Agent: observation dimension must be positive");
    if (config_.policy_delay < 1) throw std::invalid_argument("Td3Agent: policy_delay must be >= 1");
    actor_ = nn::Mlp(layout(obs_dim, config_.actor_hidden, kActionDim), nn::Activation::relu, nn::Activation::tanh);
    critic1_ = nn::Mlp(layout(obs_dim + kActionDim, config_.critic_hidden, 1), nn::Activation::relu,
                       nn::Activation::identity);
    critic2_ = critic1_;
    actor_.initialize(rng_, config_.actor_output_scale);
    critic1_.initialize(rng_);
    critic2_.initialize(rng_);
    actor_target_ = actor_;
    critic1_target_ = critic1_;
    critic2_target_ = critic2_;
    actor_opt_.lr = config_.actor_lr;
    critic1_opt_.lr = config_.critic_lr;
    critic2_opt_.lr = config_.critic_lr;
}

NormalizedAction Td3Agent::act(std::span<const double> obs) const {
    const auto out = actor_.forward(obs);
    return {out[0], out[1]};
}

std::vector<double> Td3Agent::critic_inputs(std::span<const Transition* const> batch, bool next) const {
    const std::size_t width = obs_dim_ + kActionDim;
    std::vector<double> x(batch.size() * width);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& obs = next ? batch[b]->next_obs : batch[b]->obs;
        if (obs.size() != obs_dim_) throw std::invalid_argument("Td3Agent: observation size mismatch");
        std::copy(obs.begin(), obs.end(), x.begin() + static_cast<std::ptrdiff_t>(b * width));
        x[b * width + obs_dim_] = batch[b]->action[0];
        x[b * width + obs_dim_ + 1] = batch[b]->action[1];
    }
    return x;
}

std::vector<double> Td3Agent::td_targets(std::span<const Transition* const> batch) {
    const std::size_t n = batch.size();
    const std::size_t width = obs_dim_ + kActionDim;
    std::vector<double> x = critic_inputs(batch, true);

    std::vector<double> next_obs(n * obs_dim_);
    for (std::size_t b = 0; b < n; ++b) {
        std::copy(x.begin() + static_cast<std::ptrdiff_t>(b * width),
                  x.begin() + static_cast<std::ptrdiff_t>(b * width + obs_dim_),
                  next_obs.begin() + static_cast<std::ptrdiff_t>(b * obs_dim_));
    }
    nn::Mlp::Tape tape;
    const auto next_actions = actor_target_.forward(next_obs, n, tape);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a = 0; a < kActionDim; ++a) {
            const double noise = std::clamp(gaussian(rng_, config_.target_noise), -config_.noise_clip, config_.noise_clip);
            x[b * width + obs_dim_ + a] = std::clamp(next_actions[b * kActionDim + a] + noise, -1.0, 1.0);
        }
    }
    nn::Mlp::Tape t1, t2;
    const auto q1 = critic1_target_.forward(x, n, t1);
    const auto q2 = critic2_target_.forward(x, n, t2);
    std::vector<double> y(n);
    for (std::size_t b = 0; b < n; ++b) {
        const double bootstrap = batch[b]->done ? 0.0 : config_.gamma * std::min(q1[b], q2[b]);
        y[b] = batch[b]->reward + bootstrap;
    }
    return y;
}

CriticLosses Td3Agent::critic_update(std::span<const Transition* const> batch) {
    const std::size_t n = batch.size();
    if (n == 0) throw std::invalid_argument("critic_update: empty batch");
    const std::vector<double> y = td_targets(batch);
    const std::vector<double> x = critic_inputs(batch, false);

    CriticLosses losses;
    const auto regress = [&](nn::Mlp& critic, nn::AdamState& opt, double& loss) {
        nn::Mlp::Tape tape;
        const auto q = critic.forward(x, n, tape);
        std::vector<double> grad(n);
        loss = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const double err = q[b] - y[b];
            loss += err * err;
            grad[b] = 2.0 * err / static_cast<double>(n);
        }
        loss /= static_cast<double>(n);
        std::vector<double> pgrad(critic.parameter_count(), 0.0);
        critic.backward(tape, grad, pgrad, {});
        nn::adam_step(critic.params(), pgrad, opt);
    };
    regress(critic1_, critic1_opt_, losses.critic1);
    regress(critic2_, critic2_opt_, losses.critic2);
    ++critic_updates_;
    return losses;
}

bool Td3Agent::actor_update_and_targets(std::span<const Transition* const> batch) {
    if (critic_updates_ % config_.policy_delay != 0) return false;
    const std::size_t n = batch.size();
    const std::size_t width = obs_dim_ + kActionDim;

    std::vector<double> obs(n * obs_dim_);
    for (std::size_t b = 0; b < n; ++b) {
        std::copy(batch[b]->obs.begin(), batch[b]->obs.end(), obs.begin() + static_cast<std::ptrdiff_t>(b * obs_dim_));
    }
    nn::Mlp::Tape actor_tape;
    const auto actions = actor_.forward(obs, n, actor_tape);

    std::vector<double> x(n * width);
    for (std::size_t b = 0; b < n; ++b) {
        std::copy(obs.begin() + static_cast<std::ptrdiff_t>(b * obs_dim_),
                  obs.begin() + static_cast<std::ptrdiff_t>((b + 1) * obs_dim_),
                  x.begin() + static_cast<std::ptrdiff_t>(b * width));
        x[b * width + obs_dim_] = actions[b * kActionDim];
        x[b * width + obs_dim_ + 1] = actions[b * kActionDim + 1];
    }
    nn::Mlp::Tape critic_tape;
    critic1_.forward(x, n, critic_tape);
    // Ascend mean Q1: d(-mean Q)/dQ = -1/n.
    const std::vector<double> dq(n, -1.0 / static_cast<double>(n));
    std::vector<double> dx(n * width);
    critic1_.backward(critic_tape, dq, {}, dx);

    std::vector<double> da(n * kActionDim);
    for (std::size_t b = 0; b < n; ++b) {
        da[b * kActionDim] = dx[b * width + obs_dim_];
        da[b * kActionDim + 1] = dx[b * width + obs_dim_ + 1];
    }
    std::vector<double> pgrad(actor_.parameter_count(), 0.0);
    actor_.backward(actor_tape, da, pgrad, {});
    nn::adam_step(actor_.params(), pgrad, actor_opt_);

    nn::soft_update(actor_target_.params(), actor_.params(), config_.tau);
    nn::soft_update(critic1_target_.params(), critic1_.params(), config_.tau);
    nn::soft_update(critic2_target_.params(), critic2_.params(), config_.tau);
    return true;
}

bool Td3Agent::train_step(const SortedReplayBuffer& buffer, CriticLosses* losses) {
    if (buffer.size() < config_.batch_size) return false;
    const SampledBatch batch = buffer.sample(config_.batch_size, config_.rho, config_.q, rng_, config_.episode_segments);
    const CriticLosses l = critic_update(batch.items);
    if (losses != nullptr) *losses = l;
    actor_update_and_targets(batch.items);
    return true;
}

void save_config(io::BinaryWriter& out, const Td3Config& c) {
    const auto sizes = [&](const std::vector<std::size_t>& v) {
        out.u64(v.size());
        for (auto s : v) out.u64(s);
    };
    sizes(c.actor_hidden);
    sizes(c.critic_hidden);
    out.f64(c.gamma);
    out.f64(c.tau);
    out.i64(c.policy_delay);
    out.f64(c.target_noise);
    out.f64(c.noise_clip);
    out.f64(c.explore_noise);
    out.u64(c.batch_size);
    out.u64(c.buffer_capacity);
    out.f64(c.actor_lr);
    out.f64(c.critic_lr);
    out.f64(c.rho);
    out.f64(c.q);
    out.f64(c.actor_output_scale);
    out.u64(c.episode_segments ? 1 : 0);
}

Td3Config load_config(io::BinaryReader& in) {
    const auto sizes = [&] {
        std::vector<std::size_t> v(in.u64());
        for (auto& s : v) s = in.u64();
        return v;
    };
    Td3Config c;
    c.actor_hidden = sizes();
    c.critic_hidden = sizes();
    c.gamma = in.f64();
    c.tau = in.f64();
    c.policy_delay = static_cast<int>(in.i64());
    c.target_noise = in.f64();
    c.noise_clip = in.f64();
    c.explore_noise = in.f64();
    c.batch_size = in.u64();
    c.buffer_capacity = in.u64();
    c.actor_lr = in.f64();
    c.critic_lr = in.f64();
    c.rho = in.f64();
    c.q = in.f64();
    c.actor_output_scale = in.f64();
    c.episode_segments = in.u64() != 0;
    return c;
}

void Td3Agent::save(io::BinaryWriter& out) const {
    out.u64(obs_dim_);
    save_config(out, config_);
    for (const nn::Mlp* net : {&actor_, &actor_target_, &critic1_, &critic2_, &critic1_target_, &critic2_target_}) {
        net->save(out);
    }
    actor_opt_.save(out);
    critic1_opt_.save(out);
    critic2_opt_.save(out);
    out.i64(critic_updates_);
    std::ostringstream rng_state;
    rng_state << rng_;
    out.str(rng_state.str());
}

Td3Agent Td3Agent::load(io::BinaryReader& in) {
    Td3Agent agent;
    agent.obs_dim_ = in.u64();
    agent.config_ = load_config(in);
    for (nn::Mlp* net : {&agent.actor_, &agent.actor_target_, &agent.critic1_, &agent.critic2_, &agent.critic1_target_,
                         &agent.critic2_target_}) {
        *net = nn::Mlp::load(in);
    }
    agent.actor_opt_ = nn::AdamState::load(in);
    agent.critic1_opt_ = nn::AdamState::load(in);
    agent.critic2_opt_ = nn::AdamState::load(in);
    agent.critic_updates_ = in.i64();
    std::istringstream rng_state(in.str());
    rng_state >> agent.rng_;
    if (agent.actor_.input_size() != agent.obs_dim_) throw io::FormatError("Td3Agent: actor input size mismatch");
    return agent;
}

bool Td3Agent::operator==(const Td3Agent& o) const {
    return obs_dim_ == o.obs_dim_ && actor_ == o.actor_ && actor_target_ == o.actor_target_ &&
           critic1_ == o.critic1_ && critic2_ == o.critic2_ && critic1_target_ == o.critic1_target_ &&
           critic2_target_ == o.critic2_target_ && actor_opt_ == o.actor_opt_ && critic1_opt_ == o.critic1_opt_ &&
           critic2_opt_ == o.critic2_opt_ && critic_updates_ == o.critic_updates_ && rng_ == o.rng_;
}

ActionChoice perturb_action(const NormalizedAction& actor_output, const NormalizedAction& noise,
                            const RobotLimits& limits) {
    ActionChoice c;
    for (std::size_t i = 0; i < kActionDim; ++i) c.normalized[i] = std::clamp(actor_output[i] + noise[i], -1.0, 1.0);
    c.command = to_command(c.normalized, limits);
    return c;
}

ActionChoice select_action(const nn::Mlp& actor, std::span<const double> obs, double sigma, std::mt19937_64& rng,
                           const RobotLimits& limits) {
    const auto out = actor.forward(obs);
    const double n0 = gaussian(rng, sigma);
    const double n1 = gaussian(rng, sigma);
    return perturb_action({out[0], out[1]}, {n0, n1}, limits);
}

}  // namespace cnav::rl
