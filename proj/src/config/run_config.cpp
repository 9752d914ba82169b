#include "cnav/config/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cnav::config {
namespace {

using nlohmann::json;

json::json_pointer pointer(const std::string& dotted) {
    std::string p;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) p += "/" + part;
    return json::json_pointer(p);
}

// Writes every field into a nested JSON tree.
struct Writer {
    json out = json::object();
    template <class T>
    void field(const std::string& key, const T& value) {
        out[pointer(key)] = value;
    }
    template <class E, class ToS, class FromS>
    void enumeration(const std::string& key, const E& value, ToS to_s, FromS) {
        out[pointer(key)] = std::string(to_s(value));
    }
};

// Reads fields from a flattened JSON tree, recording which keys were used.
struct Reader {
    std::map<std::string, json> leaves;
    std::set<std::string> used;

    const json* find(const std::string& key) {
        const auto it = leaves.find(key);
        if (it == leaves.end()) return nullptr;
        used.insert(key);
        return &it->second;
    }

    [[noreturn]] static void type_error(const std::string& key, const char* expected) {
        throw ConfigError(key, "config key '" + key + "' must be " + expected);
    }

    void field(const std::string& key, double& v) {
        if (const json* j = find(key)) {
            if (!j->is_number()) type_error(key, "a number");
            v = j->get<double>();
        }
    }
    void field(const std::string& key, bool& v) {
        if (const json* j = find(key)) {
            if (!j->is_boolean()) type_error(key, "a boolean");
            v = j->get<bool>();
        }
    }
    void field(const std::string& key, int& v) {
        if (const json* j = find(key)) {
            if (!j->is_number_integer()) type_error(key, "an integer");
            v = j->get<int>();
        }
    }
    void field(const std::string& key, std::size_t& v) {
        if (const json* j = find(key)) {
            if (!j->is_number_unsigned()) type_error(key, "a non-negative integer");
            v = j->get<std::size_t>();
        }
    }
    void field(const std::string& key, std::string& v) {
        if (const json* j = find(key)) {
            if (!j->is_string()) type_error(key, "a string");
            v = j->get<std::string>();
        }
    }
    template <class T>
    void field(const std::string& key, std::vector<T>& v) {
        if (const json* j = find(key)) {
            if (!j->is_array()) type_error(key, "an array");
            std::vector<T> out;
            for (const json& e : *j) {
                if constexpr (std::is_integral_v<T>) {
                    if (!e.is_number_unsigned()) type_error(key, "an array of non-negative integers");
                } else {
                    if (!e.is_number()) type_error(key, "an array of numbers");
                }
                out.push_back(e.get<T>());
            }
            v = std::move(out);
        }
    }
    template <class E, class ToS, class FromS>
    void enumeration(const std::string& key, E& value, ToS, FromS from_s) {
        if (const json* j = find(key)) {
            if (!j->is_string()) type_error(key, "a string");
            try {
                value = from_s(j->get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key, "config key '" + key + "': " + e.what());
            }
        }
    }
};

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
    if (j.is_object()) {
        if (j.empty() && !prefix.empty()) out[prefix] = j;
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else {
        out[prefix] = j;
    }
}

// Single list of every tunable, shared by reading and writing.
template <class V, class C>
void visit(V& v, C& c) {
    auto& p = c.pipeline;
    v.enumeration("variant", p.variant, [](eval::Variant x) { return eval::to_string(x); }, eval::variant_from_string);
    v.field("output_dir", c.output_dir);

    v.field("world.v_min", c.world.limits.v_min);
    v.field("world.v_max", c.world.limits.v_max);
    v.field("world.w_max", c.world.limits.w_max);
    v.field("world.collision_distance", c.world.collision_distance);
    v.field("world.goal_tolerance", c.world.goal_tolerance);
    v.field("world.time_limit", c.world.time_limit);
    v.field("world.sim_dt", p.sim_dt);
    v.field("world.substeps", p.substeps);
    v.field("world.orca.time_horizon", c.world.orca.time_horizon);
    v.field("world.orca.neighbor_dist", c.world.orca.neighbor_dist);
    v.field("world.orca.reciprocity", c.world.orca.reciprocity);
    v.field("world.orca.obstacles_avoid_robot", c.world.orca.obstacles_avoid_robot);
    v.field("world.orca.robot_radius", c.world.orca.robot_radius);
    v.field("world.orca.waypoint_tolerance", c.world.orca.waypoint_tolerance);
    v.field("world.orca.waypoint_margin", c.world.orca.waypoint_margin);
    v.field("world.sensor.rays", c.world.sensor.rays);
    v.field("world.sensor.fov", c.world.sensor.fov);
    v.field("world.sensor.max_range", c.world.sensor.max_range);

    v.field("dwa.accel_v", p.dwa.accel.v);
    v.field("dwa.accel_w", p.dwa.accel.w);
    v.field("dwa.decision_dt", p.dwa.decision_dt);
    v.field("dwa.v_samples", p.dwa.v_samples);
    v.field("dwa.w_samples", p.dwa.w_samples);
    v.field("dwa.rollout_steps", p.dwa.rollout_steps);
    v.field("dwa.rollout_dt", p.dwa.rollout_dt);
    v.field("dwa.weights.alpha", p.dwa.weights.alpha);
    v.field("dwa.weights.beta", p.dwa.weights.beta);
    v.field("dwa.weights.gamma", p.dwa.weights.gamma);
    v.field("dwa.weights.delta", p.dwa.weights.delta);
    v.field("dwa.sensing_range", p.dwa.sensing_range);
    v.field("dwa.prefilter_k", p.dwa.prefilter_k);
    v.field("dwa.literal_eq1", p.dwa.literal_eq1);
    v.field("dwa.density_cap", p.dwa.density_cap);
    v.field("dwa.clearance_includes_walls", p.dwa.clearance_includes_walls);

    v.field("corridor.sections", p.corridor.sections);
    v.field("corridor.half_width_max", p.corridor.half_width_max);

    v.enumeration("reward.mode", p.reward_mode, [](reward::CorridorMode m) { return reward::to_string(m); },
                  reward::corridor_mode_from_string);
    v.enumeration("reward.origin", p.corridor_origin, [](eval::CorridorOrigin o) { return eval::to_string(o); },
                  eval::corridor_origin_from_string);

    v.field("observation.candidate_slots", p.observation.candidate_slots);
    v.field("observation.goal_distance_scale", p.observation.goal_distance_scale);
    v.field("observation.clearance_scale", p.observation.clearance_scale);
    v.field("observation.half_width_max", p.observation.half_width_max);
    v.field("observation.objective_scale", p.observation.objective_scale);
    v.field("observation.scan_rays", p.observation.scan_rays);

    v.field("td3.actor_hidden", c.td3.actor_hidden);
    v.field("td3.critic_hidden", c.td3.critic_hidden);
    v.field("td3.gamma", c.td3.gamma);
    v.field("td3.tau", c.td3.tau);
    v.field("td3.policy_delay", c.td3.policy_delay);
    v.field("td3.target_noise", c.td3.target_noise);
    v.field("td3.noise_clip", c.td3.noise_clip);
    v.field("td3.explore_noise", c.td3.explore_noise);
    v.field("td3.batch_size", c.td3.batch_size);
    v.field("td3.buffer_capacity", c.td3.buffer_capacity);
    v.field("td3.actor_lr", c.td3.actor_lr);
    v.field("td3.critic_lr", c.td3.critic_lr);
    v.field("td3.rho", c.td3.rho);
    v.field("td3.q", c.td3.q);
    v.field("td3.actor_output_scale", c.td3.actor_output_scale);
    v.field("td3.episode_segments", c.td3.episode_segments);

    v.field("scenario.obstacle_count", c.scenario.obstacle_count);
    v.field("scenario.arena_side", c.scenario.arena_side);
    v.field("scenario.start_offset", c.scenario.start_offset);
    v.field("scenario.goal_distance", c.scenario.goal_distance);
    v.field("scenario.goal_bearings_deg", c.scenario.goal_bearings_deg);
    v.field("scenario.speed_min", c.scenario.speed_min);
    v.field("scenario.speed_max", c.scenario.speed_max);
    v.field("scenario.obstacle_radius", c.scenario.obstacle_radius);
    v.field("scenario.min_clearance", c.scenario.min_clearance);
    v.field("scenario.endpoint_clearance", c.scenario.endpoint_clearance);
    v.field("scenario.max_attempts", c.scenario.max_attempts);

    v.field("training.episodes", c.training.episodes);
    v.field("training.seed", c.training.seed);
    v.field("training.warmup_steps", c.training.warmup_steps);
    v.field("training.updates_per_decision", c.training.updates_per_decision);
    v.field("training.checkpoint_every", c.training.checkpoint_every);

    v.field("evaluation.episodes", c.evaluation.episodes);
    v.field("evaluation.seeds", c.evaluation.seeds);
    v.field("evaluation.workers", c.evaluation.workers);
}

void require(bool ok, const std::string& key, const std::string& rule) {
    if (!ok) throw ConfigError(key, "config key '" + key + "' " + rule);
}

void validate(const RunConfig& c) {
    const auto& p = c.pipeline;
    require(c.world.limits.v_min >= 0.0 && c.world.limits.v_max > c.world.limits.v_min, "world.v_max",
            "must exceed world.v_min >= 0");
    require(c.world.limits.w_max > 0.0, "world.w_max", "must be positive");
    require(c.world.collision_distance >= 0.0, "world.collision_distance", "must be non-negative");
    require(c.world.goal_tolerance > 0.0, "world.goal_tolerance", "must be positive");
    require(c.world.time_limit > 0.0, "world.time_limit", "must be positive");
    require(p.sim_dt > 0.0, "world.sim_dt", "must be positive");
    require(p.substeps >= 1, "world.substeps", "must be >= 1");
    require(c.world.orca.time_horizon > 0.0, "world.orca.time_horizon", "must be positive");
    require(c.world.orca.neighbor_dist > 0.0, "world.orca.neighbor_dist", "must be positive");
    require(c.world.orca.reciprocity > 0.0 && c.world.orca.reciprocity <= 1.0, "world.orca.reciprocity",
            "must lie in (0, 1]");
    require(c.world.sensor.rays >= 8, "world.sensor.rays", "must be >= 8");
    require(c.world.sensor.fov > 0.0, "world.sensor.fov", "must be positive");
    require(c.world.sensor.max_range > 0.0, "world.sensor.max_range", "must be positive");

    require(p.dwa.accel.v > 0.0, "dwa.accel_v", "must be positive");
    require(p.dwa.accel.w > 0.0, "dwa.accel_w", "must be positive");
    require(p.dwa.decision_dt > 0.0, "dwa.decision_dt", "must be positive");
    require(p.dwa.v_samples >= 1, "dwa.v_samples", "must be >= 1");
    require(p.dwa.w_samples >= 1, "dwa.w_samples", "must be >= 1");
    require(p.dwa.rollout_steps >= 1, "dwa.rollout_steps", "must be >= 1");
    require(p.dwa.rollout_dt > 0.0, "dwa.rollout_dt", "must be positive");
    require(p.dwa.weights.alpha >= 0.0, "dwa.weights.alpha", "must be non-negative");
    require(p.dwa.weights.beta >= 0.0, "dwa.weights.beta", "must be non-negative");
    require(p.dwa.weights.gamma >= 0.0, "dwa.weights.gamma", "must be non-negative");
    require(p.dwa.weights.delta >= 0.0, "dwa.weights.delta", "must be non-negative");
    require(p.dwa.sensing_range > 0.0, "dwa.sensing_range", "must be positive");
    require(p.dwa.density_cap > 0.0, "dwa.density_cap", "must be positive");

    require(p.corridor.sections >= 2, "corridor.sections", "must be >= 2");
    require(p.corridor.half_width_max > 0.0, "corridor.half_width_max", "must be positive");

    require(p.observation.candidate_slots >= 1, "observation.candidate_slots", "must be >= 1");
    require(p.observation.goal_distance_scale > 0.0, "observation.goal_distance_scale", "must be positive");
    require(p.observation.clearance_scale > 0.0, "observation.clearance_scale", "must be positive");
    require(p.observation.half_width_max > 0.0, "observation.half_width_max", "must be positive");
    require(p.observation.objective_scale > 0.0, "observation.objective_scale", "must be positive");
    require(p.observation.scan_rays >= 1, "observation.scan_rays", "must be >= 1");

    require(!c.td3.actor_hidden.empty(), "td3.actor_hidden", "must list at least one layer");
    require(!c.td3.critic_hidden.empty(), "td3.critic_hidden", "must list at least one layer");
    for (auto s : c.td3.actor_hidden) require(s > 0, "td3.actor_hidden", "must be positive");
    for (auto s : c.td3.critic_hidden) require(s > 0, "td3.critic_hidden", "must be positive");
    require(c.td3.gamma >= 0.0 && c.td3.gamma <= 1.0, "td3.gamma", "must lie in [0, 1]");
    require(c.td3.tau >= 0.0 && c.td3.tau <= 1.0, "td3.tau", "must lie in [0, 1]");
    require(c.td3.policy_delay >= 1, "td3.policy_delay", "must be >= 1");
    require(c.td3.target_noise >= 0.0, "td3.target_noise", "must be non-negative");
    require(c.td3.noise_clip >= 0.0, "td3.noise_clip", "must be non-negative");
    require(c.td3.explore_noise >= 0.0, "td3.explore_noise", "must be non-negative");
    require(c.td3.batch_size >= 1, "td3.batch_size", "must be >= 1");
    require(c.td3.buffer_capacity >= c.td3.batch_size, "td3.buffer_capacity", "must be >= td3.batch_size");
    require(c.td3.actor_lr > 0.0, "td3.actor_lr", "must be positive");
    require(c.td3.critic_lr > 0.0, "td3.critic_lr", "must be positive");
    require(c.td3.rho >= 0.0 && c.td3.rho <= 1.0, "td3.rho", "must lie in [0, 1]");
    require(c.td3.q > 0.0 && c.td3.q <= 1.0, "td3.q", "must lie in (0, 1]");
    require(c.td3.actor_output_scale > 0.0, "td3.actor_output_scale", "must be positive");

    try {
        c.scenario.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const std::string key = what.substr(0, what.find(' '));
        throw ConfigError(key, "config key '" + key + "' out of range");
    }

    require(c.training.episodes >= 0, "training.episodes", "must be non-negative");
    require(c.training.warmup_steps >= 0, "training.warmup_steps", "must be non-negative");
    require(c.training.updates_per_decision >= 0, "training.updates_per_decision", "must be non-negative");
    require(c.training.checkpoint_every >= 0, "training.checkpoint_every", "must be non-negative");
    require(c.evaluation.episodes >= 1, "evaluation.episodes", "must be >= 1");
    require(!c.evaluation.seeds.empty(), "evaluation.seeds", "must list at least one seed");
    require(c.evaluation.workers >= 1, "evaluation.workers", "must be >= 1");
}

}  // namespace

nlohmann::json to_json(const RunConfig& cfg) {
    Writer w;
    visit(w, cfg);
    return w.out;
}

RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("", "config root must be an object");
    Reader r;
    flatten(j, "", r.leaves);
    RunConfig cfg;
    visit(r, cfg);
    for (const auto& [key, value] : r.leaves) {
        if (!r.used.contains(key)) throw ConfigError(key, "unknown config key '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

RunConfig load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", "config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    j[pointer(key)] = value;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    nlohmann::json j = to_json(cfg);
    j.erase("output_dir");
    j["evaluation"].erase("workers");
    return fnv1a(j.dump());
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cnav::config
