#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "cnav/config/run_config.hpp"
#include "cnav/eval/scenario.hpp"
#include "cnav/eval/trainer.hpp"
#include "cnav/io/episode_log.hpp"

using namespace cnav;
using namespace cnav::io;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
    return n;
}

std::size_t bad_line(const std::string& text) {
    std::istringstream in(text);
    try {
        replay_log(in);
    } catch (const LogError& e) {
        return e.line;
    }
    return 0;
}

config::RunConfig tiny_config() {
    auto j = nlohmann::json::object();
    config::apply_override(j, "scenario.obstacle_count=3");
    config::apply_override(j, "scenario.arena_side=6");
    config::apply_override(j, "scenario.goal_distance=3");
    config::apply_override(j, "world.time_limit=4");
    config::apply_override(j, "td3.actor_hidden=[8]");
    config::apply_override(j, "td3.critic_hidden=[8]");
    config::apply_override(j, "td3.batch_size=8");
    config::apply_override(j, "td3.buffer_capacity=200");
    config::apply_override(j, "training.warmup_steps=10");
    return config::from_json(j);
}

}  // namespace

TEST_CASE("binary round trip is exact") {
    std::stringstream s;
    BinaryWriter w(s);
    const double values[] = {0.1, -0.0, std::numeric_limits<double>::denorm_min(),
                             std::numeric_limits<double>::infinity(), 1.0 / 3.0};
    w.u64(0xfedcba9876543210ull);
    w.i64(-5);
    for (double v : values) w.f64(v);
    w.str("hello\0world");
    w.f64s(values);
    w.f64(std::nan(""));

    BinaryReader r(s);
    CHECK(r.u64() == 0xfedcba9876543210ull);
    CHECK(r.i64() == -5);
    for (double v : values) CHECK(std::bit_cast<std::uint64_t>(r.f64()) == std::bit_cast<std::uint64_t>(v));
    CHECK(r.str() == "hello");
    const auto back = r.f64s();
    REQUIRE(back.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(values[i]));
    CHECK(std::isnan(r.f64()));
    CHECK_THROWS_AS(r.u64(), FormatError);
}

TEST_CASE("integers are little endian") {
    std::stringstream s;
    BinaryWriter(s).u64(0x0102030405060708ull);
    const std::string bytes = s.str();
    REQUIRE(bytes.size() == 8);
    CHECK(bytes[0] == 0x08);
    CHECK(bytes[7] == 0x01);
}

TEST_CASE("episode log records and replays") {
    config::RunConfig cfg = tiny_config();
    auto rng = eval::derive_rng(3, 0, 0);
    WorldState w = eval::make_scenario(cfg.scenario, 0, rng, cfg.world);
    std::mt19937_64 policy_rng(1);

    std::ostringstream out;
    EpisodeLog log(out, {0x1234, 3}, "safemove", 0);
    const auto r = eval::run_episode(w, eval::random_policy(), eval::Mode::eval, cfg.pipeline, policy_rng, log.hooks());
    log.finish(r);
    const std::string text = out.str();

    const auto steps = static_cast<std::size_t>(std::lround(r.sim_time / cfg.pipeline.sim_dt)) + 1;
    CHECK(count(text, "\"type\":\"header\"") == 1);
    CHECK(count(text, "\"type\":\"step\"") == steps);
    CHECK(count(text, "\"type\":\"decision\"") == static_cast<std::size_t>(r.decisions));
    CHECK(count(text, "\"type\":\"result\"") == 1);
    CHECK(text.rfind("{\"type\":\"result\"", 0) == std::string::npos);

    std::istringstream in(text);
    const Replay replay = replay_log(in);
    CHECK(replay.provenance.config_hash == 0x1234);
    CHECK(replay.provenance.seed == 3);
    std::size_t robots = 0, obstacles = 0, corridors = 0;
    for (const auto& row : replay.rows) {
        robots += row.record == "robot";
        obstacles += row.record == "obstacle";
        corridors += row.record == "corridor";
    }
    CHECK(robots == steps);
    CHECK(obstacles == 3 * steps);
    CHECK(corridors > 0);
    CHECK(replay.rows.front().x == w.robot.x);
    CHECK(replay.rows.front().y == w.robot.y);

    std::ostringstream csv;
    write_replay_csv(csv, replay);
    CHECK(csv.str().rfind("# config_hash=0000000000001234 seed=3\nrecord,index,t,id,vertex,x,y\n", 0) == 0);
    std::ostringstream gp;
    write_gnuplot_script(gp, "r.csv", "r.png");
    CHECK(gp.str().find("'r.csv'") != std::string::npos);
}

TEST_CASE("corrupt logs report the failing line") {
    const std::string header = R"({"type":"header","config_hash":"00000000000000ff","seed":1})";
    const std::string step = R"({"type":"step","t":0,"robot":[0,0,0,0,0],"obstacles":[[1,1]],"events":[]})";
    CHECK(bad_line(header + "\n" + step + "\n{oops\n") == 3);
    CHECK(bad_line(header + "\n" + step + "\n" + R"({"type":"step","t":0.05})" + "\n") == 3);
    CHECK(bad_line(header + "\n" + R"({"type":"weird"})" + "\n") == 2);
    CHECK(bad_line(step + "\n") == 1);
    CHECK(bad_line("") == 1);
    CHECK(bad_line(header + "\n\n" + step + "\n" + R"({"type":"step","t":1,"robot":[0,0],"obstacles":[[1]],"events":[]})") == 4);
    CHECK(bad_line(header + "\n" + step + "\n") == 0);
}

TEST_CASE("metrics csv") {
    eval::Metrics none;
    none.episodes = 40;
    eval::Metrics some;
    some.episodes = 40;
    some.successes = 30;
    some.success_rate = 0.75;
    some.avg_length = 8.25;
    some.avg_speed = 0.2;
    some.avg_speed_pooled = 0.19;
    const MetricsRow rows[] = {{"safemove", "default", 1, some}, {"drl", "default", 2, none}};
    const std::uint64_t seeds[] = {1, 2};
    std::ostringstream out;
    write_metrics_csv(out, 0xabc, seeds, rows);
    CHECK(out.str() ==
          "# config_hash=0000000000000abc seed=1;2\n"
          "variant,scenario,seed,success_rate,avg_length_m,avg_speed_mps,episodes,avg_speed_pooled_mps\n"
          "safemove,default,1,0.75,8.25,0.2,40,0.19\n"
          "drl,default,2,0,NA,NA,40,NA\n");

    std::ostringstream curve;
    write_curve_header(curve, {0xabc, 7});
    write_curve_row(curve, 3, -1.5, eval::Outcome::success, 12, 2.5, 6.0, 0.125, 99);
    CHECK(curve.str() ==
          "# config_hash=0000000000000abc seed=7\n"
          "episode,return,success,outcome,decisions,path_length,sim_time,critic_loss,buffer_size\n"
          "3,-1.5,1,success,12,2.5,6,0.125,99\n");
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("trainer checkpoint resumes bit for bit") {
    const std::string path = "test_io_ckpt.bin";
    eval::Trainer straight(tiny_config());
    eval::Trainer first(tiny_config());
    for (int i = 0; i < 3; ++i) {
        straight.train_episode();
        first.train_episode();
    }
    first.save(path);
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    eval::Trainer resumed = eval::Trainer::load(path);
    CHECK(resumed == first);

    const auto info = eval::read_checkpoint_info(path);
    CHECK(info.variant == "safemove");
    CHECK(info.episode == 3);
    CHECK(info.config_hash == config::config_hash(tiny_config()));

    for (int i = 0; i < 2; ++i) {
        const auto a = straight.train_episode();
        const auto b = resumed.train_episode();
        CHECK(a.episode_return == b.episode_return);
        CHECK(a.critic_loss == b.critic_loss);
        CHECK(a.decisions == b.decisions);
    }
    CHECK(resumed == straight);
    CHECK(resumed.agent().actor().params() == straight.agent().actor().params());
    std::remove(path.c_str());

    {
        std::ofstream junk(path, std::ios::binary);
        junk << "not a checkpoint";
    }
    CHECK_THROWS_AS(eval::Trainer::load(path), FormatError);
    std::remove(path.c_str());
    CHECK_THROWS(eval::Trainer::load("missing.bin"));
}
