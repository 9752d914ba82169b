#include "cnav/dwa/dwa_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cnav/simd/kernels.hpp"

namespace cnav::dwa {

VelocityWindow dynamic_window(const RobotState& state, const AccelLimits& accel, double dt,
                              const RobotLimits& limits) {
    if (!(accel.v > 0.0) || !(accel.w > 0.0)) throw std::invalid_argument("dynamic_window: accel limits must be positive");
    VelocityWindow win;
    win.v_min = std::max(state.v - accel.v * dt, limits.v_min);
    win.v_max = std::min(state.v + accel.v * dt, limits.v_max);
    win.w_min = std::max(state.w - accel.w * dt, -limits.w_max);
    win.w_max = std::min(state.w + accel.w * dt, limits.w_max);
    // A state outside the limits would leave an empty interval; collapse it.
    if (win.v_min > win.v_max) win.v_min = win.v_max = std::clamp(state.v, limits.v_min, limits.v_max);
    if (win.w_min > win.w_max) win.w_min = win.w_max = std::clamp(state.w, -limits.w_max, limits.w_max);
    return win;
}

std::vector<RobotState> rollout(const RobotState& state, VelocityCommand cmd, int pose_count, double dt) {
    if (pose_count < 2) throw std::invalid_argument("rollout: at least 2 poses required");
    std::vector<RobotState> poses;
    poses.reserve(static_cast<std::size_t>(pose_count));
    RobotState s = state;
    s.v = cmd.v;
    s.w = cmd.w;
    poses.push_back(s);
    for (int i = 1; i < pose_count; ++i) {
        s = step_robot(s, cmd, dt);
        poses.push_back(s);
    }
    return poses;
}

std::optional<double> avg_distance(std::span<const Vec2> poses, std::span<const Vec2> obstacles) {
    if (obstacles.empty() || poses.empty()) return std::nullopt;
    std::vector<double> px(poses.size()), py(poses.size()), qx(obstacles.size()), qy(obstacles.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        px[i] = poses[i].x;
        py[i] = poses[i].y;
    }
    for (std::size_t j = 0; j < obstacles.size(); ++j) {
        qx[j] = obstacles[j].x;
        qy[j] = obstacles[j].y;
    }
    const double total = simd::active_kernels().sum_pair_distances(px.data(), py.data(), px.size(), qx.data(),
                                                                   qy.data(), qx.size());
    return total / static_cast<double>(poses.size() * obstacles.size());
}

double density_cost(std::size_t n_obs, std::optional<double> mean_distance, double delta, double cap) {
    if (n_obs == 0 || !mean_distance) return 0.0;
    if (*mean_distance <= 0.0) return cap;
    return delta * static_cast<double>(n_obs) / *mean_distance;
}

CostTerms cost_terms(const CandidateTrajectory& candidate, std::span<const Obstacle> obstacles,
                     const std::optional<Bounds>& arena, Vec2 goal, double max_range) {
    CostTerms terms;
    const RobotState& last = candidate.poses.back();
    const Vec2 to_goal = goal - last.position();
    const double bearing = std::atan2(to_goal.y, to_goal.x);
    terms.heading = std::numbers::pi - std::abs(wrap_angle(bearing - last.theta));

    double clearance = max_range;
    for (const RobotState& p : candidate.poses) {
        clearance = std::min(clearance, min_obstacle_distance(p.position(), obstacles, arena));
    }
    terms.dist_obst = clearance;
    terms.vel = candidate.v;
    return terms;
}

CandidateTrajectory evaluate_candidate(const RobotState& state, VelocityCommand cmd, const WorldState& world,
                                       const Params& params) {
    CandidateTrajectory c;
    c.v = cmd.v;
    c.w = cmd.w;
    c.poses = rollout(state, cmd, params.rollout_steps + 1, params.rollout_dt);

    const CostTerms terms = cost_terms(c, world.obstacles, params.clearance_includes_walls ? world.arena : std::nullopt,
                                       world.goal, params.sensing_range);
    c.heading_score = terms.heading;
    c.dist_obst_score = terms.dist_obst;
    c.vel_score = terms.vel;

    std::vector<Vec2> positions;
    positions.reserve(c.poses.size());
    for (const RobotState& p : c.poses) positions.push_back(p.position());

    std::vector<Vec2> in_range;
    for (const Obstacle& o : world.obstacles) {
        const bool near = std::any_of(positions.begin(), positions.end(), [&](const Vec2& p) {
            return o.surface_distance(p) <= params.sensing_range;
        });
        if (near) in_range.push_back(o.reference_point(state.position()));
    }
    c.n_obs = in_range.size();
    c.density_cost = density_cost(c.n_obs, avg_distance(positions, in_range), 1.0, params.density_cap);
    return c;
}

namespace {

// Min-max normalisation; a (numerically) constant term maps to 0.
std::vector<double> normalize(std::span<const CandidateTrajectory> cs, double CandidateTrajectory::*term) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : cs) {
        lo = std::min(lo, c.*term);
        hi = std::max(hi, c.*term);
    }
    std::vector<double> out(cs.size(), 0.0);
    const double span = hi - lo;
    if (!(span > 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)}))) return out;
    for (std::size_t i = 0; i < cs.size(); ++i) out[i] = (cs[i].*term - lo) / span;
    return out;
}

}  // namespace

std::size_t select_best(std::span<CandidateTrajectory> candidates, const Weights& weights, bool literal_eq1) {
    if (candidates.empty()) throw NoAdmissibleVelocity();
    const auto heading = normalize(candidates, &CandidateTrajectory::heading_score);
    const auto dist = normalize(candidates, &CandidateTrajectory::dist_obst_score);
    const auto vel = normalize(candidates, &CandidateTrajectory::vel_score);
    const auto density = normalize(candidates, &CandidateTrajectory::density_cost);
    const double density_sign = literal_eq1 ? 1.0 : -1.0;

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].total_cost = weights.alpha * heading[i] + weights.beta * dist[i] + weights.gamma * vel[i] +
                                   density_sign * weights.delta * density[i];
    }

    const double tie_tol = 1e-12 * (std::abs(weights.alpha) + std::abs(weights.beta) + std::abs(weights.gamma) +
                                    std::abs(weights.delta));
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double gi = candidates[i].total_cost;
        const double gb = candidates[best].total_cost;
        if (gi > gb + tie_tol) {
            best = i;
        } else if (gi >= gb - tie_tol && std::abs(candidates[i].w) < std::abs(candidates[best].w)) {
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> prefilter_by_density(std::span<const CandidateTrajectory> candidates, int k) {
    std::vector<std::size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (k <= 0 || static_cast<std::size_t>(k) >= candidates.size()) return idx;
    std::vector<std::size_t> counts;
    counts.reserve(candidates.size());
    for (const auto& c : candidates) counts.push_back(c.n_obs);
    std::nth_element(counts.begin(), counts.begin() + (k - 1), counts.end());
    const std::size_t threshold = counts[static_cast<std::size_t>(k - 1)];
    std::erase_if(idx, [&](std::size_t i) { return candidates[i].n_obs > threshold; });
    return idx;
}

Plan plan(const WorldState& world, const Params& params) {
    const RobotState& state = world.robot;
    const VelocityWindow win = dynamic_window(state, params.accel, params.decision_dt, world.params.limits);

    std::vector<CandidateTrajectory> all;
    const int nv = std::max(params.v_samples, 1);
    const int nw = std::max(params.w_samples, 1);
    all.reserve(static_cast<std::size_t>(nv * nw));
    for (int i = 0; i < nv; ++i) {
        const double v = nv == 1 ? win.v_max : win.v_min + (win.v_max - win.v_min) * i / (nv - 1);
        for (int j = 0; j < nw; ++j) {
            const double w = nw == 1 ? 0.5 * (win.w_min + win.w_max) : win.w_min + (win.w_max - win.w_min) * j / (nw - 1);
            all.push_back(evaluate_candidate(state, {v, w}, world, params));
        }
    }

    Plan result;
    for (std::size_t i : prefilter_by_density(all, params.prefilter_k)) result.candidates.push_back(std::move(all[i]));
    const std::size_t best = select_best(result.candidates, params.weights, params.literal_eq1);

    result.ranking.resize(result.candidates.size());
    std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
    std::stable_sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t a, std::size_t b) {
        return result.candidates[a].total_cost > result.candidates[b].total_cost;
    });
    // select_best's tie rules decide the head of the ranking.
    auto it = std::find(result.ranking.begin(), result.ranking.end(), best);
    std::rotate(result.ranking.begin(), it, it + 1);
    return result;
}

}  // namespace cnav::dwa
