#pragma once

#include <optional>
#include <span>

#include "cnav/eval/episode.hpp"

namespace cnav::eval {

/// Success rate plus length and speed averaged over successful episodes.
/// Length and speed are nullopt when there are no successes.
struct Metrics {
    std::size_t episodes{0};
    std::size_t successes{0};
    double success_rate{0.0};
    std::optional<double> avg_length;
    std::optional<double> avg_speed;         ///< mean of per-episode speeds
    std::optional<double> avg_speed_pooled;  ///< total length / total time

    bool operator==(const Metrics&) const = default;
};

/// Throws std::invalid_argument on an empty result list.
Metrics compute_metrics(std::span<const EpisodeResult> results);

}  // namespace cnav::eval
