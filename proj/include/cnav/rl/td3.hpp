#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cnav/io/binary_io.hpp"
#include "cnav/nn/mlp.hpp"
#include "cnav/rl/action.hpp"
#include "cnav/rl/replay_buffer.hpp"

namespace cnav::rl {

struct Td3Config {
    std::vector<std::size_t> actor_hidden{256, 256};
    std::vector<std::size_t> critic_hidden{256, 256};
    double gamma{0.99};
    double tau{0.005};
    int policy_delay{2};
    double target_noise{0.2};
    double noise_clip{0.5};
    double explore_noise{0.1};
    std::size_t batch_size{256};
    std::size_t buffer_capacity{100000};
    double actor_lr{1e-3};
    double critic_lr{1e-3};
    double rho{0.5};   ///< share of each batch drawn from the high-reward stratum
    double q{0.25};    ///< size of the high-reward stratum as a fraction of the buffer
    double actor_output_scale{0.01};
    bool episode_segments{false};  ///< extend top-stratum draws to episode segments
};

struct CriticLosses {
    double critic1{0.0};
    double critic2{0.0};
};

/// Twin-critic deterministic actor-critic with delayed policy updates and
/// target policy smoothing.
class Td3Agent {
public:
    Td3Agent(std::size_t obs_dim, Td3Config config, std::uint64_t seed);

    std::size_t obs_dim() const { return obs_dim_; }
    const Td3Config& config() const { return config_; }

    /// Deterministic policy output in [-1, 1]^2.
    NormalizedAction act(std::span<const double> obs) const;

    /// TD targets r + gamma (1 - done) min(Q1', Q2')(s', smoothed mu'(s')).
    std::vector<double> td_targets(std::span<const Transition* const> batch);

    /// Regresses both critics onto the TD targets; counts one critic update.
    CriticLosses critic_update(std::span<const Transition* const> batch);

    /// On every policy_delay-th critic update: one actor ascent step on Q1
    /// followed by soft updates of all three target networks. Returns
    /// whether the update ran.
    bool actor_update_and_targets(std::span<const Transition* const> batch);

    /// Samples a batch and runs both updates. Returns false while the
    /// buffer is still warming up.
    bool train_step(const SortedReplayBuffer& buffer, CriticLosses* losses = nullptr);

    nn::Mlp& actor() { return actor_; }
    nn::Mlp& actor_target() { return actor_target_; }
    nn::Mlp& critic1() { return critic1_; }
    nn::Mlp& critic2() { return critic2_; }
    nn::Mlp& critic1_target() { return critic1_target_; }
    nn::Mlp& critic2_target() { return critic2_target_; }
    const nn::Mlp& actor() const { return actor_; }
    std::int64_t critic_updates() const { return critic_updates_; }
    std::mt19937_64& rng() { return rng_; }

    void save(io::BinaryWriter& out) const;
    static Td3Agent load(io::BinaryReader& in);

    bool operator==(const Td3Agent& other) const;

private:
    Td3Agent() = default;
    std::vector<double> critic_inputs(std::span<const Transition* const> batch, bool next) const;

    std::size_t obs_dim_{0};
    Td3Config config_;
    nn::Mlp actor_, actor_target_;
    nn::Mlp critic1_, critic2_, critic1_target_, critic2_target_;
    nn::AdamState actor_opt_, critic1_opt_, critic2_opt_;
    std::int64_t critic_updates_{0};
    std::mt19937_64 rng_;
};

struct ActionChoice {
    NormalizedAction normalized{};
    VelocityCommand command;
};

/// Actor output plus Gaussian exploration noise (sigma in normalised units;
/// 0 disables), clipped to [-1, 1]^2 and mapped onto the velocity box.
ActionChoice select_action(const nn::Mlp& actor, std::span<const double> obs, double sigma, std::mt19937_64& rng,
                           const RobotLimits& limits);

/// Same clip-and-map step for an already computed actor output.
ActionChoice perturb_action(const NormalizedAction& actor_output, const NormalizedAction& noise,
                            const RobotLimits& limits);

void save_config(io::BinaryWriter& out, const Td3Config& c);
Td3Config load_config(io::BinaryReader& in);

}  // namespace cnav::rl
