// Command-line entry point: train, eval, replay, scenario.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnav/config/run_config.hpp"
#include "cnav/eval/evaluation.hpp"
#include "cnav/eval/trainer.hpp"
#include "cnav/io/episode_log.hpp"
#include "cnav/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace cnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct ConfigArgs {
    std::string path;
    std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("-c,--config", args.path, "JSON run configuration");
    cmd->add_option("-s,--set", args.overrides, "override a config key, e.g. --set td3.gamma=0.98")->take_all();
}

nlohmann::json read_config_json(const ConfigArgs& args) {
    nlohmann::json j = nlohmann::json::object();
    if (!args.path.empty()) {
        std::ifstream in(args.path);
        if (!in) throw config::ConfigError("", "cannot open config file " + args.path);
        j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw config::ConfigError("", "config file " + args.path + " is not valid JSON");
    }
    for (const auto& o : args.overrides) config::apply_override(j, o);
    return j;
}

// Environment overrides are limited to the output directory and thread count.
void apply_environment(config::RunConfig& cfg) {
    if (const char* dir = std::getenv("CNAV_OUTPUT_DIR"); dir != nullptr && *dir != '\0') cfg.output_dir = dir;
    if (const char* threads = std::getenv("CNAV_THREADS"); threads != nullptr && *threads != '\0') {
        const int n = std::atoi(threads);
        if (n < 1) throw config::ConfigError("CNAV_THREADS", "CNAV_THREADS must be a positive integer");
        cfg.evaluation.workers = n;
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Timestamps and other run-specific details live here so that the primary
// outputs stay byte-identical across reruns.
void write_run_info(const fs::path& dir, const std::string& command, const config::RunConfig& cfg,
                    const std::string& started, double wall_seconds) {
    nlohmann::json info = {{"command", command},
                           {"config_hash", config::hash_hex(config::config_hash(cfg))},
                           {"started_utc", started},
                           {"finished_utc", utc_now()},
                           {"wall_seconds", wall_seconds},
                           {"workers", cfg.evaluation.workers},
                           {"simd", simd::active_kernels().isa == simd::Isa::avx2 ? "avx2" : "scalar"}};
    std::ofstream(dir / "run_info.json") << info.dump(2) << '\n';
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::vector<std::string> lines;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

// Keeps the header and rows for episodes before `episode`, so a resumed run
// continues the curve without duplicates.
void truncate_curves(const fs::path& p, int episode) {
    if (!fs::exists(p)) return;
    const auto lines = read_lines(p);
    std::ofstream out(p, std::ios::trunc);
    for (const auto& line : lines) {
        if (line.empty()) continue;
        if (line[0] == '#' || line.rfind("episode,", 0) == 0) {
            out << line << '\n';
            continue;
        }
        if (std::stoi(line.substr(0, line.find(','))) < episode) out << line << '\n';
    }
}

int cmd_train(const ConfigArgs& cargs, const std::string& resume, int episodes_override, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();

    std::optional<eval::Trainer> trainer;
    if (!resume.empty()) {
        if (!fs::exists(resume)) {
            std::cerr << "error: checkpoint not found: " << resume << '\n';
            return kExitRuntime;
        }
        trainer.emplace(eval::Trainer::load(resume));
    } else {
        config::RunConfig cfg = config::from_json(read_config_json(cargs));
        apply_environment(cfg);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        trainer.emplace(std::move(cfg));
    }
    config::RunConfig cfg = trainer->config();
    if (!resume.empty()) {
        apply_environment(cfg);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
    }
    const int target = episodes_override >= 0 ? episodes_override : cfg.training.episodes;

    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    const std::uint64_t hash = config::config_hash(trainer->config());
    std::ofstream(dir / "config.json") << config::to_json(trainer->config()).dump(2) << '\n';

    const fs::path curves_path = dir / "curves.csv";
    truncate_curves(curves_path, trainer->episode());
    const bool fresh = !fs::exists(curves_path) || fs::file_size(curves_path) == 0;
    std::ofstream curves(curves_path, std::ios::app);
    if (fresh) io::write_curve_header(curves, {hash, trainer->config().training.seed});

    const fs::path ckpt = dir / "checkpoint.bin";
    const int every = trainer->config().training.checkpoint_every;
    int successes = 0;
    int run = 0;
    while (trainer->episode() < target) {
        const eval::CurveRow row = trainer->train_episode();
        io::write_curve_row(curves, row.episode, row.episode_return, row.outcome, row.decisions, row.path_length,
                            row.sim_time, row.critic_loss, row.buffer_size);
        curves.flush();
        successes += row.outcome == eval::Outcome::success;
        ++run;
        if (every > 0 && trainer->episode() % every == 0) trainer->save(ckpt.string());
    }
    trainer->save(ckpt.string());

    const nlohmann::json summary = {{"config_hash", config::hash_hex(hash)},
                                    {"seed", trainer->config().training.seed},
                                    {"variant", std::string(eval::to_string(trainer->config().pipeline.variant))},
                                    {"episodes_total", trainer->episode()},
                                    {"episodes_this_run", run},
                                    {"successes_this_run", successes},
                                    {"transitions", trainer->total_steps()}};
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    write_run_info(dir, "train", cfg,
                   started, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << "trained " << run << " episodes (total " << trainer->episode() << "), " << successes
              << " successes; checkpoint " << ckpt.string() << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string policy{"actor"};
    std::string variant;
    std::string out_dir;
    int episodes{-1};
    int obstacles{-1};
    std::vector<std::uint64_t> seeds;
    int workers{-1};
    bool logs{false};
};

int cmd_eval(const ConfigArgs& cargs, const EvalArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();

    config::RunConfig cfg;
    eval::Policy policy;
    std::string label;
    if (a.policy == "actor") {
        if (a.checkpoint.empty()) throw config::ConfigError("checkpoint", "--checkpoint is required for --policy actor");
        if (!fs::exists(a.checkpoint)) {
            std::cerr << "error: checkpoint not found: " << a.checkpoint << '\n';
            return kExitRuntime;
        }
        const eval::CheckpointInfo info = eval::read_checkpoint_info(a.checkpoint);
        if (!a.variant.empty() && a.variant != info.variant) {
            throw config::ConfigError("variant", "checkpoint was trained as variant '" + info.variant +
                                                     "', cannot evaluate it as '" + a.variant + "'");
        }
        nlohmann::json j = nlohmann::json::parse(info.config_json);
        if (!cargs.path.empty() || !cargs.overrides.empty()) {
            const nlohmann::json user = read_config_json(cargs);
            const config::RunConfig requested = config::from_json(user);
            if (config::config_hash(requested) != info.config_hash && !cargs.path.empty()) {
                std::cerr << "warning: config hash " << config::hash_hex(config::config_hash(requested))
                          << " differs from the checkpoint's " << config::hash_hex(info.config_hash) << '\n';
            }
            for (const auto& o : cargs.overrides) config::apply_override(j, o);
        }
        cfg = config::from_json(j);
        const eval::Trainer trainer = eval::Trainer::load(a.checkpoint);
        policy = eval::actor_policy(trainer.agent().actor(), 0.0);
        label = info.variant;
    } else if (a.policy == "dwa" || a.policy == "random") {
        cfg = config::from_json(read_config_json(cargs));
        if (a.policy == "dwa") {
            cfg.pipeline.variant = eval::Variant::drl_dwa;
            policy = eval::dwa_policy();
        } else {
            policy = eval::random_policy();
        }
        label = a.policy;
    } else {
        throw config::ConfigError("policy", "--policy must be actor, dwa or random");
    }
    apply_environment(cfg);
    if (!a.out_dir.empty()) cfg.output_dir = a.out_dir;
    if (a.episodes > 0) cfg.evaluation.episodes = a.episodes;
    if (a.obstacles >= 0) cfg.scenario.obstacle_count = a.obstacles;
    if (!a.seeds.empty()) cfg.evaluation.seeds = a.seeds;
    if (a.workers > 0) cfg.evaluation.workers = a.workers;

    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    const std::uint64_t hash = config::config_hash(cfg);
    const std::string scenario = "obstacles_" + std::to_string(cfg.scenario.obstacle_count);

    std::vector<io::MetricsRow> rows;
    for (const std::uint64_t seed : cfg.evaluation.seeds) {
        const eval::EvalRequest req = eval::eval_request(cfg, seed);
        std::vector<std::unique_ptr<std::ofstream>> files(static_cast<std::size_t>(req.episodes));
        std::vector<std::unique_ptr<io::EpisodeLog>> logs(static_cast<std::size_t>(req.episodes));
        eval::HooksFactory hooks;
        if (a.logs) {
            fs::create_directories(dir / "episodes");
            hooks = [&](int i) {
                const auto idx = static_cast<std::size_t>(i);
                const fs::path p = dir / "episodes" / ("seed" + std::to_string(seed) + "_ep" + std::to_string(i) + ".jsonl");
                files[idx] = std::make_unique<std::ofstream>(p);
                logs[idx] = std::make_unique<io::EpisodeLog>(*files[idx], io::Provenance{hash, seed}, label, i);
                return logs[idx]->hooks();
            };
        }
        const auto results = eval::evaluate(policy, req, hooks);
        if (a.logs) {
            for (std::size_t i = 0; i < results.size(); ++i) logs[i]->finish(results[i]);
        }
        rows.push_back({label, scenario, seed, eval::compute_metrics(results)});
        const auto& m = rows.back().metrics;
        std::cout << label << " seed " << seed << ": success " << m.success_rate << " over " << m.episodes
                  << " episodes\n";
    }
    std::ofstream csv(dir / "metrics.csv", std::ios::trunc);
    io::write_metrics_csv(csv, hash, cfg.evaluation.seeds, rows);
    write_run_info(dir, "eval", cfg, started, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return kExitOk;
}

int cmd_replay(const std::string& log_path, const std::string& out_path, const std::string& script_path) {
    std::ifstream in(log_path);
    if (!in) {
        std::cerr << "error: cannot open log " << log_path << '\n';
        return kExitRuntime;
    }
    io::Replay replay;
    try {
        replay = io::replay_log(in);
    } catch (const io::LogError& e) {
        std::cerr << "error: corrupt log " << log_path << ": " << e.what() << '\n';
        return kExitRuntime;
    }
    std::ofstream out(out_path, std::ios::trunc);
    io::write_replay_csv(out, replay);
    if (!script_path.empty()) {
        std::ofstream script(script_path, std::ios::trunc);
        io::write_gnuplot_script(script, out_path, fs::path(out_path).replace_extension(".png").string());
    }
    return kExitOk;
}

int cmd_scenario(const ConfigArgs& cargs, std::uint64_t seed, int goal, const std::string& out_path) {
    config::RunConfig cfg = config::from_json(read_config_json(cargs));
    auto rng = eval::derive_rng(seed, 0, static_cast<std::uint64_t>(goal));
    const WorldState w = eval::make_scenario(cfg.scenario, static_cast<std::size_t>(goal), rng, cfg.world);
    nlohmann::json obstacles = nlohmann::json::array();
    for (const Obstacle& o : w.obstacles) {
        obstacles.push_back({{"center", {o.center.x, o.center.y}},
                             {"radius", o.radius},
                             {"pref_speed", o.pref_speed},
                             {"waypoint", {o.waypoint.x, o.waypoint.y}}});
    }
    const nlohmann::json j = {{"config_hash", config::hash_hex(config::config_hash(cfg))},
                              {"seed", seed},
                              {"goal_index", goal},
                              {"start", {w.start.x, w.start.y}},
                              {"goal", {w.goal.x, w.goal.y}},
                              {"arena", {w.arena->min_x, w.arena->min_y, w.arena->max_x, w.arena->max_y}},
                              {"obstacles", obstacles}};
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream(out_path) << j.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corridor-guided TD3 navigation: training, evaluation and log tools"};
    app.require_subcommand(1);

    ConfigArgs train_cfg;
    std::string resume;
    std::string train_out;
    int train_episodes = -1;
    int train_workers = 0;
    auto* train = app.add_subcommand("train", "train a policy");
    add_config_options(train, train_cfg);
    train->add_option("--resume", resume, "continue from a checkpoint");
    train->add_option("-o,--out", train_out, "output directory");
    train->add_option("--episodes", train_episodes, "total episode target (overrides training.episodes)");
    train->add_option("--workers", train_workers, "accepted for symmetry; training is sequential");

    ConfigArgs eval_cfg;
    EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint or a baseline policy");
    add_config_options(ev, eval_cfg);
    ev->add_option("--checkpoint", eval_args.checkpoint, "checkpoint to evaluate");
    ev->add_option("--policy", eval_args.policy, "actor (default), dwa or random");
    ev->add_option("--variant", eval_args.variant, "expected variant of the checkpoint");
    ev->add_option("-o,--out", eval_args.out_dir, "output directory");
    ev->add_option("-n,--episodes", eval_args.episodes, "episodes per seed");
    ev->add_option("--obstacles", eval_args.obstacles, "obstacle count of the scenario");
    ev->add_option("--seeds", eval_args.seeds, "evaluation seeds")->delimiter(',');
    ev->add_option("--workers", eval_args.workers, "parallel evaluation workers");
    ev->add_flag("--logs", eval_args.logs, "write per-episode JSONL logs");

    std::string log_path;
    std::string replay_out;
    std::string script;
    auto* rp = app.add_subcommand("replay", "turn an episode log into plot-ready CSV");
    rp->add_option("log", log_path, "episode log (JSONL)")->required();
    rp->add_option("-o,--out", replay_out, "CSV output")->required();
    rp->add_option("--gnuplot", script, "also write a gnuplot script");

    ConfigArgs scen_cfg;
    std::uint64_t scen_seed = 1;
    int scen_goal = 0;
    std::string scen_out;
    auto* sc = app.add_subcommand("scenario", "print a generated scenario as JSON");
    add_config_options(sc, scen_cfg);
    sc->add_option("--seed", scen_seed, "scenario seed");
    sc->add_option("--goal", scen_goal, "goal index");
    sc->add_option("-o,--out", scen_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train) return cmd_train(train_cfg, resume, train_episodes, train_out);
        if (*ev) return cmd_eval(eval_cfg, eval_args);
        if (*rp) return cmd_replay(log_path, replay_out, script);
        if (*sc) return cmd_scenario(scen_cfg, scen_seed, scen_goal, scen_out);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
