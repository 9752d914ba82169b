#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cnav/rl/td3.hpp"

using namespace cnav;
using namespace cnav::rl;
using doctest::Approx;

namespace {

Td3Config small_config() {
    Td3Config c;
    c.actor_hidden = {8};
    c.critic_hidden = {8};
    c.batch_size = 4;
    c.buffer_capacity = 64;
    return c;
}

std::vector<Transition> random_transitions(std::mt19937_64& rng, std::size_t n, std::size_t dim, bool done = false) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Transition> out(n);
    for (auto& t : out) {
        t.obs.resize(dim);
        t.next_obs.resize(dim);
        for (double& x : t.obs) x = u(rng);
        for (double& x : t.next_obs) x = u(rng);
        t.action = {u(rng), u(rng)};
        t.reward = 3 * u(rng);
        t.done = done;
    }
    return out;
}

std::vector<const Transition*> pointers(const std::vector<Transition>& v) {
    std::vector<const Transition*> p;
    for (const auto& t : v) p.push_back(&t);
    return p;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("action mapping") {
    const RobotLimits lim{};
    CHECK(to_command({0, 0}, lim).v == Approx(0.11));
    CHECK(to_command({0, 0}, lim).w == 0.0);
    CHECK(to_command({1, 1}, lim) == VelocityCommand{0.22, 2.84});
    CHECK(to_command({-1, -1}, lim) == VelocityCommand{0.0, -2.84});
    CHECK(to_command({2, -3}, lim) == VelocityCommand{0.22, -2.84});

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 10000; ++i) {
        const NormalizedAction a{u(rng), u(rng)};
        const auto back = to_normalized(to_command(a, lim), lim);
        CHECK(std::abs(back[0] - a[0]) < 1e-12);
        CHECK(std::abs(back[1] - a[1]) < 1e-12);
    }
}

TEST_CASE("exploration noise is clipped before mapping") {
    const RobotLimits lim{};
    const auto c = perturb_action({0.9, 0.0}, {0.3, 0.0}, lim);
    CHECK(c.normalized[0] == 1.0);
    CHECK(c.command.v == Approx(0.22));

    nn::Mlp actor({3, 2}, nn::Activation::relu, nn::Activation::tanh);
    std::mt19937_64 rng(2);
    const std::vector<double> obs{0.1, 0.2, 0.3};
    const auto quiet = select_action(actor, obs, 0.0, rng, lim);
    CHECK(quiet.normalized == NormalizedAction{0.0, 0.0});
    CHECK(quiet.command.v == Approx(0.11));
    for (int i = 0; i < 200; ++i) {
        const auto noisy = select_action(actor, obs, 2.0, rng, lim);
        CHECK(std::abs(noisy.normalized[0]) <= 1.0);
        CHECK(std::abs(noisy.normalized[1]) <= 1.0);
    }
}

TEST_CASE("gamma = 0 and terminal transitions give y = r") {
    std::mt19937_64 rng(3);
    auto cfg = small_config();
    cfg.gamma = 0.0;
    Td3Agent agent(5, cfg, 11);
    const auto batch = random_transitions(rng, 6, 5);
    const auto y = agent.td_targets(pointers(batch));
    for (std::size_t i = 0; i < batch.size(); ++i) CHECK(y[i] == batch[i].reward);

    Td3Agent discounting(5, small_config(), 11);
    const auto terminal = random_transitions(rng, 6, 5, true);
    const auto yt = discounting.td_targets(pointers(terminal));
    for (std::size_t i = 0; i < terminal.size(); ++i) CHECK(yt[i] == terminal[i].reward);
}

TEST_CASE("hand-built tiny networks") {
    Td3Config cfg;
    cfg.actor_hidden = {};
    cfg.critic_hidden = {};
    cfg.gamma = 0.5;
    cfg.target_noise = 0.0;
    Td3Agent agent(1, cfg, 1);
    // mu'(s) = tanh(W s + b) with W = (1, -2), b = (0, 0.5).
    agent.actor_target().params() = {1.0, -2.0, 0.0, 0.5};
    // Q1'(s, a) = s + 2 a0 + a1 + 1; Q2'(s, a) = -s + a0 + a1.
    agent.critic1_target().params() = {1.0, 2.0, 1.0, 1.0};
    agent.critic2_target().params() = {-1.0, 1.0, 1.0, 0.0};

    Transition t;
    t.obs = {0.0};
    t.next_obs = {0.3};
    t.reward = 2.0;
    const Transition* p = &t;
    const double a0 = std::tanh(0.3), a1 = std::tanh(-0.6 + 0.5);
    const double q1 = 0.3 + 2 * a0 + a1 + 1.0;
    const double q2 = -0.3 + a0 + a1;
    const auto y = agent.td_targets(std::span<const Transition* const>(&p, 1));
    CHECK(y[0] == Approx(2.0 + 0.5 * std::min(q1, q2)).epsilon(1e-14));
}

TEST_CASE("twin target never exceeds either single-critic target") {
    std::mt19937_64 rng(4);
    auto cfg = small_config();
    cfg.target_noise = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Td3Agent agent(4, cfg, 100 + trial);
        const auto batch = random_transitions(rng, 16, 4);
        const auto y = agent.td_targets(pointers(batch));
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const auto a = agent.actor_target().forward(batch[b].next_obs);
            std::vector<double> x = batch[b].next_obs;
            x.push_back(a[0]);
            x.push_back(a[1]);
            const double y1 = batch[b].reward + cfg.gamma * agent.critic1_target().forward(x)[0];
            const double y2 = batch[b].reward + cfg.gamma * agent.critic2_target().forward(x)[0];
            CHECK(y[b] <= y1 + 1e-12);
            CHECK(y[b] <= y2 + 1e-12);
        }
    }
}

TEST_CASE("critic regression reduces the loss") {
    std::mt19937_64 rng(5);
    auto cfg = small_config();
    cfg.gamma = 0.0;
    cfg.critic_hidden = {32};
    cfg.critic_lr = 1e-2;
    Td3Agent agent(3, cfg, 7);
    const auto batch = random_transitions(rng, 16, 3);
    const auto first = agent.critic_update(pointers(batch));
    CriticLosses last;
    for (int i = 0; i < 500; ++i) last = agent.critic_update(pointers(batch));
    CHECK(last.critic1 < 0.5 * first.critic1);
    CHECK(last.critic2 < 0.5 * first.critic2);
    CHECK(agent.critic_updates() == 501);
}

TEST_CASE("tau = 1 copies and tau = 0 freezes the targets") {
    std::mt19937_64 rng(6);
    const auto batch = random_transitions(rng, 8, 3);
    auto cfg = small_config();
    cfg.policy_delay = 1;
    cfg.tau = 1.0;
    Td3Agent copy(3, cfg, 1);
    copy.critic_update(pointers(batch));
    REQUIRE(copy.actor_update_and_targets(pointers(batch)));
    CHECK(copy.actor_target() == copy.actor());
    CHECK(copy.critic1_target() == copy.critic1());
    CHECK(copy.critic2_target() == copy.critic2());

    cfg.tau = 0.0;
    Td3Agent frozen(3, cfg, 1);
    const auto before = frozen.actor_target();
    const auto c1 = frozen.critic1_target();
    frozen.critic_update(pointers(batch));
    frozen.actor_update_and_targets(pointers(batch));
    CHECK(frozen.actor_target() == before);
    CHECK(frozen.critic1_target() == c1);
    CHECK_FALSE(frozen.actor() == before);
}

TEST_CASE("delayed actor updates") {
    std::mt19937_64 rng(7);
    const auto batch = random_transitions(rng, 8, 3);
    Td3Agent agent(3, small_config(), 2);
    for (int step = 1; step <= 6; ++step) {
        const auto before = agent.actor().params();
        agent.critic_update(pointers(batch));
        const bool ran = agent.actor_update_and_targets(pointers(batch));
        CHECK(ran == (step % 2 == 0));
        CHECK((agent.actor().params() != before) == ran);
    }
}

TEST_CASE("target distance decays geometrically with fixed online nets") {
    std::mt19937_64 rng(8);
    const auto batch = random_transitions(rng, 8, 3);
    auto cfg = small_config();
    cfg.policy_delay = 1;
    cfg.tau = 0.1;
    cfg.actor_lr = 0.0;
    cfg.critic_lr = 0.0;
    Td3Agent agent(3, cfg, 3);
    // Push the targets away so the distance starts non-zero.
    for (double& p : agent.actor_target().params()) p += 0.5;
    for (double& p : agent.critic1_target().params()) p -= 0.25;
    const double d0 = distance(agent.actor_target().params(), agent.actor().params());
    const double c0 = distance(agent.critic1_target().params(), agent.critic1().params());
    for (int n = 1; n <= 30; ++n) {
        agent.critic_update(pointers(batch));
        agent.actor_update_and_targets(pointers(batch));
        const double expected = std::pow(0.9, n);
        CHECK(std::abs(distance(agent.actor_target().params(), agent.actor().params()) - d0 * expected) < 1e-9);
        CHECK(std::abs(distance(agent.critic1_target().params(), agent.critic1().params()) - c0 * expected) < 1e-9);
    }
}

TEST_CASE("train_step waits for a full batch") {
    SortedReplayBuffer buf(64);
    Td3Agent agent(3, small_config(), 4);
    std::mt19937_64 rng(9);
    auto items = random_transitions(rng, 4, 3);
    for (int i = 0; i < 3; ++i) buf.push(items[i]);
    CHECK_FALSE(agent.train_step(buf));
    buf.push(items[3]);
    CriticLosses l;
    CHECK(agent.train_step(buf, &l));
    CHECK(l.critic1 >= 0.0);
}

TEST_CASE("checkpoint round trip continues identically") {
    SortedReplayBuffer buf(64);
    std::mt19937_64 rng(10);
    for (auto& t : random_transitions(rng, 32, 3)) buf.push(t);
    Td3Agent agent(3, small_config(), 5);
    for (int i = 0; i < 5; ++i) agent.train_step(buf);

    std::stringstream s;
    io::BinaryWriter w(s);
    agent.save(w);
    io::BinaryReader r(s);
    Td3Agent back = Td3Agent::load(r);
    CHECK(back == agent);
    for (int i = 0; i < 5; ++i) {
        agent.train_step(buf);
        back.train_step(buf);
    }
    CHECK(back == agent);
    CHECK(back.actor().params() == agent.actor().params());
}

TEST_CASE("invalid construction") {
    CHECK_THROWS_AS(Td3Agent(0, small_config(), 1), std::invalid_argument);
    auto cfg = small_config();
    cfg.policy_delay = 0;
    CHECK_THROWS_AS(Td3Agent(3, cfg, 1), std::invalid_argument);
}
