#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>

#include "cnav/io/binary_io.hpp"
#include "cnav/rl/action.hpp"

namespace cnav::rl {

struct Transition {
    std::vector<double> obs;
    NormalizedAction action{};
    double reward{0.0};
    std::vector<double> next_obs;
    bool done{false};
    std::int64_t episode_id{0};
    std::int64_t step_idx{0};

    bool operator==(const Transition&) const = default;
};

/// Thrown when sampling from a buffer that holds fewer items than requested.
struct BufferWarmingUp : std::runtime_error {
    BufferWarmingUp() : std::runtime_error("buffer warming up") {}
};

struct SampledBatch {
    std::vector<const Transition*> items;
    std::vector<bool> from_top;  ///< which stratum each item was drawn from
};

/// Replay memory kept in reward order. When full, the lowest-reward item is
/// evicted (oldest first among equal rewards). Sampling mixes a high-reward
/// stratum with uniform replay.
class SortedReplayBuffer {
public:
    explicit SortedReplayBuffer(std::size_t capacity);

    /// Rejects non-finite rewards with std::invalid_argument.
    void push(Transition t);

    /// ceil(rho * batch) draws uniformly from the top ceil(q * size) rewards,
    /// the rest uniformly from the whole buffer, with replacement. With
    /// episode_segments, each top draw is followed by the stored successors
    /// of that transition in its episode until the top share is filled.
    SampledBatch sample(std::size_t batch_size, double rho, double q, std::mt19937_64& rng,
                        bool episode_segments = false) const;

    std::size_t size() const { return order_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return order_.empty(); }
    /// Largest stored reward; -infinity when empty.
    double r_max() const;

    /// Item at reward rank r (0 = highest reward).
    const Transition& by_rank(std::size_t r) const;
    /// Stored rewards, non-increasing.
    std::vector<double> ordered_rewards() const;

    void save(io::BinaryWriter& out) const;
    static SortedReplayBuffer load(io::BinaryReader& in);

private:
    // (reward, insertion sequence) -> slot
    using Key = std::pair<double, std::uint64_t>;
    using OrderTree = __gnu_pbds::tree<Key, std::size_t, std::less<Key>, __gnu_pbds::rb_tree_tag,
                                       __gnu_pbds::tree_order_statistics_node_update>;

    std::size_t capacity_;
    std::vector<Transition> slots_;
    OrderTree order_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> by_step_;  // (episode, step) -> slot
    std::uint64_t next_seq_{0};
};

}  // namespace cnav::rl
