#include "cnav/eval/metrics.hpp"

#include <stdexcept>

namespace cnav::eval {

Metrics compute_metrics(std::span<const EpisodeResult> results) {
    if (results.empty()) throw std::invalid_argument("compute_metrics: no episodes");
    Metrics m;
    m.episodes = results.size();
    double length = 0.0;
    double time = 0.0;
    double speed = 0.0;
    for (const EpisodeResult& r : results) {
        if (r.outcome != Outcome::success) continue;
        ++m.successes;
        length += r.path_length;
        time += r.sim_time;
        speed += r.avg_speed;
    }
    m.success_rate = static_cast<double>(m.successes) / static_cast<double>(m.episodes);
    if (m.successes > 0) {
        const auto n = static_cast<double>(m.successes);
        m.avg_length = length / n;
        m.avg_speed = speed / n;
        if (time > 0.0) m.avg_speed_pooled = length / time;
    }
    return m;
}

}  // namespace cnav::eval
