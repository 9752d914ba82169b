#pragma once

#include <cstdint>
#include <string>

#include "cnav/config/run_config.hpp"
#include "cnav/eval/episode.hpp"
#include "cnav/rl/replay_buffer.hpp"
#include "cnav/rl/td3.hpp"

namespace cnav::eval {

/// One row of the training curve.
struct CurveRow {
    int episode{0};
    double episode_return{0.0};
    Outcome outcome{Outcome::timeout};
    int decisions{0};
    double path_length{0.0};
    double sim_time{0.0};
    double critic_loss{0.0};  ///< mean over the episode's updates, 0 without updates
    std::size_t buffer_size{0};
};

/// Sequential TD3 training over seeded scenarios. Episode i uses goal
/// i mod goal_count and a world stream derived from (seed, i), so a resumed
/// run continues exactly where the saved one stopped.
class Trainer {
public:
    explicit Trainer(config::RunConfig cfg);

    const config::RunConfig& config() const { return cfg_; }
    int episode() const { return episode_; }
    std::int64_t total_steps() const { return steps_; }
    rl::Td3Agent& agent() { return agent_; }
    const rl::Td3Agent& agent() const { return agent_; }
    const rl::SortedReplayBuffer& buffer() const { return buffer_; }

    CurveRow train_episode(const EpisodeHooks& extra = {});

    /// Writes to `path` via a temporary file and rename.
    void save(const std::string& path) const;
    static Trainer load(const std::string& path);

    bool operator==(const Trainer& other) const;

private:
    Trainer(config::RunConfig cfg, rl::Td3Agent agent, rl::SortedReplayBuffer buffer);

    config::RunConfig cfg_;
    rl::Td3Agent agent_;
    rl::SortedReplayBuffer buffer_;
    int episode_{0};
    std::int64_t steps_{0};
};

/// Summary readable without loading the networks.
struct CheckpointInfo {
    std::string variant;
    std::uint64_t config_hash{0};
    std::string config_json;
    int episode{0};
};

CheckpointInfo read_checkpoint_info(const std::string& path);

}  // namespace cnav::eval
