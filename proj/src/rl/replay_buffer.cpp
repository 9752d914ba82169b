#include "cnav/rl/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cnav::rl {

SortedReplayBuffer::SortedReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("SortedReplayBuffer: capacity must be positive");
}

void SortedReplayBuffer::push(Transition t) {
    if (!std::isfinite(t.reward)) throw std::invalid_argument("SortedReplayBuffer: reward must be finite");
    std::size_t slot;
    if (order_.size() >= capacity_) {
        auto lowest = order_.begin();
        slot = lowest->second;
        order_.erase(lowest);
        const auto it = by_step_.find({slots_[slot].episode_id, slots_[slot].step_idx});
        if (it != by_step_.end() && it->second == slot) by_step_.erase(it);
        slots_[slot] = std::move(t);
    } else {
        slot = slots_.size();
        slots_.push_back(std::move(t));
    }
    order_.insert({{slots_[slot].reward, next_seq_++}, slot});
    by_step_[{slots_[slot].episode_id, slots_[slot].step_idx}] = slot;
}

double SortedReplayBuffer::r_max() const {
    if (order_.empty()) return -std::numeric_limits<double>::infinity();
    return std::prev(order_.end())->first.first;
}

const Transition& SortedReplayBuffer::by_rank(std::size_t r) const {
    if (r >= order_.size()) throw std::out_of_range("SortedReplayBuffer: rank out of range");
    return slots_[order_.find_by_order(order_.size() - 1 - r)->second];
}

std::vector<double> SortedReplayBuffer::ordered_rewards() const {
    std::vector<double> out;
    out.reserve(order_.size());
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) out.push_back(it->first.first);
    return out;
}

SampledBatch SortedReplayBuffer::sample(std::size_t batch_size, double rho, double q, std::mt19937_64& rng,
                                       bool episode_segments) const {
    if (order_.size() < batch_size || order_.empty()) throw BufferWarmingUp();
    if (rho < 0.0 || rho > 1.0 || q <= 0.0 || q > 1.0) throw std::invalid_argument("sample: rho in [0,1], q in (0,1]");
    const std::size_t n = order_.size();
    const auto top_count = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(batch_size)));
    const std::size_t stratum = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q * static_cast<double>(n))));

    SampledBatch batch;
    batch.items.reserve(batch_size);
    batch.from_top.reserve(batch_size);
    std::uniform_int_distribution<std::size_t> top_rank(0, stratum - 1);
    std::uniform_int_distribution<std::size_t> any_rank(0, n - 1);
    while (batch.items.size() < top_count) {
        const Transition* t = &by_rank(top_rank(rng));
        batch.items.push_back(t);
        batch.from_top.push_back(true);
        while (episode_segments && batch.items.size() < top_count) {
            const auto next = by_step_.find({t->episode_id, t->step_idx + 1});
            if (next == by_step_.end()) break;
            t = &slots_[next->second];
            batch.items.push_back(t);
            batch.from_top.push_back(true);
        }
    }
    while (batch.items.size() < batch_size) {
        batch.items.push_back(&by_rank(any_rank(rng)));
        batch.from_top.push_back(false);
    }
    return batch;
}

namespace {

void write_transition(io::BinaryWriter& out, const Transition& t) {
    out.f64s(t.obs);
    out.f64(t.action[0]);
    out.f64(t.action[1]);
    out.f64(t.reward);
    out.f64s(t.next_obs);
    out.u64(t.done ? 1 : 0);
    out.i64(t.episode_id);
    out.i64(t.step_idx);
}

Transition read_transition(io::BinaryReader& in) {
    Transition t;
    t.obs = in.f64s();
    t.action[0] = in.f64();
    t.action[1] = in.f64();
    t.reward = in.f64();
    t.next_obs = in.f64s();
    t.done = in.u64() != 0;
    t.episode_id = in.i64();
    t.step_idx = in.i64();
    return t;
}

}  // namespace

// Items are written in insertion order so a reload reproduces the same
// (reward, sequence) keys and therefore the same sampling behaviour.
void SortedReplayBuffer::save(io::BinaryWriter& out) const {
    out.u64(capacity_);
    out.u64(next_seq_);
    std::vector<std::pair<std::uint64_t, std::size_t>> by_seq;
    by_seq.reserve(order_.size());
    for (const auto& [key, slot] : order_) by_seq.emplace_back(key.second, slot);
    std::sort(by_seq.begin(), by_seq.end());
    out.u64(by_seq.size());
    for (const auto& [seq, slot] : by_seq) {
        out.u64(seq);
        write_transition(out, slots_[slot]);
    }
}

SortedReplayBuffer SortedReplayBuffer::load(io::BinaryReader& in) {
    SortedReplayBuffer buf(in.u64());
    const std::uint64_t next_seq = in.u64();
    const std::uint64_t n = in.u64();
    if (n > buf.capacity_) throw io::FormatError("replay buffer holds more items than its capacity");
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t seq = in.u64();
        Transition t = read_transition(in);
        const std::size_t slot = buf.slots_.size();
        buf.slots_.push_back(std::move(t));
        buf.order_.insert({{buf.slots_[slot].reward, seq}, slot});
        buf.by_step_[{buf.slots_[slot].episode_id, buf.slots_[slot].step_idx}] = slot;
    }
    buf.next_seq_ = next_seq;
    return buf;
}

}  // namespace cnav::rl
