#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnav/eval/episode.hpp"
#include "cnav/eval/scenario.hpp"
#include "cnav/rl/td3.hpp"

namespace cnav::config {

/// Invalid configuration. `key` is the dotted path of the offending entry.
struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string k, const std::string& what) : std::runtime_error(what), key(std::move(k)) {}
};

struct TrainingConfig {
    int episodes{1500};
    std::uint64_t seed{1};
    int warmup_steps{1000};          ///< uniform random actions before the actor takes over
    int updates_per_decision{1};
    int checkpoint_every{100};       ///< episodes; 0 disables periodic checkpoints
};

struct EvaluationConfig {
    int episodes{40};
    std::vector<std::uint64_t> seeds{1};
    int workers{1};
};

struct RunConfig {
    eval::PipelineConfig pipeline;
    WorldParams world;
    eval::ScenarioSpec scenario;
    rl::Td3Config td3;
    TrainingConfig training;
    EvaluationConfig evaluation;
    std::string output_dir{"runs"};
};

/// Full configuration tree with every default filled in.
nlohmann::json to_json(const RunConfig& cfg);

/// Overlays `j` on the defaults. Unknown keys, wrong types and out-of-range
/// values raise ConfigError naming the key.
RunConfig from_json(const nlohmann::json& j);

RunConfig load_file(const std::string& path);

/// Applies "a.b.c=value" (value parsed as JSON, falling back to a string).
void apply_override(nlohmann::json& j, const std::string& assignment);

/// FNV-1a over the canonical serialisation, excluding settings that do not
/// change results (output directory, worker count).
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace cnav::config
