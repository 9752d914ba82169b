#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cnav/nn/mlp.hpp"
#include "oracles.hpp"

using namespace cnav::nn;
using doctest::Approx;

namespace {

std::vector<double> randoms(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("parameter layout and hand-computed forward pass") {
    Mlp net({2, 2, 1}, Activation::relu, Activation::identity);
    CHECK(net.parameter_count() == 2 * 2 + 2 + 2 + 1);
    // Layer 0: W = [[1, -1], [0.5, 2]], b = [0, -1]; layer 1: W = [[2, -3]], b = [0.5].
    net.params() = {1, -1, 0.5, 2, 0, -1, 2, -3, 0.5};
    // x = (2, 1): h = relu(1, 2) = (1, 2); y = 2 - 6 + 0.5
    CHECK(net.forward(std::vector<double>{2, 1})[0] == Approx(-3.5));
    // x = (-1, 0): h = relu(-1, -1.5) = 0; y = 0.5
    CHECK(net.forward(std::vector<double>{-1, 0})[0] == Approx(0.5));

    Mlp t({1, 1}, Activation::relu, Activation::tanh);
    t.params() = {2.0, 0.1};
    CHECK(t.forward(std::vector<double>{0.3})[0] == Approx(std::tanh(0.7)));
}

TEST_CASE("batched forward equals per-sample forward") {
    std::mt19937_64 rng(1);
    Mlp net({5, 7, 3}, Activation::relu, Activation::tanh);
    net.initialize(rng);
    const auto x = randoms(rng, 4 * 5);
    Mlp::Tape tape;
    const auto out = net.forward(x, 4, tape);
    for (std::size_t b = 0; b < 4; ++b) {
        const auto one = net.forward(std::span<const double>(x).subspan(b * 5, 5));
        for (std::size_t j = 0; j < 3; ++j) CHECK(out[b * 3 + j] == Approx(one[j]).epsilon(1e-14));
    }
}

TEST_CASE("initialisation") {
    std::mt19937_64 rng(2);
    Mlp net({10, 20, 2}, Activation::relu, Activation::tanh);
    net.initialize(rng, 0.01);
    const auto& p = net.params();
    const double bound0 = std::sqrt(6.0 / 10.0);
    for (std::size_t i = 0; i < 200; ++i) CHECK(std::abs(p[i]) <= bound0);
    for (std::size_t i = 200; i < 220; ++i) CHECK(p[i] == 0.0);
    const double bound1 = 0.01 / std::sqrt(20.0);
    for (std::size_t i = 220; i < 260; ++i) CHECK(std::abs(p[i]) <= bound1);
    std::mt19937_64 again(2);
    Mlp twin({10, 20, 2}, Activation::relu, Activation::tanh);
    twin.initialize(again, 0.01);
    CHECK(twin == net);
}

TEST_CASE("analytic gradients match central differences") {
    struct Shape {
        std::vector<std::size_t> sizes;
        Activation hidden, output;
    };
    const Shape shapes[] = {{{33, 16, 16, 2}, Activation::relu, Activation::tanh},
                            {{35, 16, 16, 1}, Activation::relu, Activation::identity},
                            {{4, 8, 3}, Activation::tanh, Activation::identity},
                            {{3, 5, 5, 5, 2}, Activation::relu, Activation::tanh}};
    for (const auto& s : shapes) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            std::mt19937_64 rng(seed);
            Mlp net(s.sizes, s.hidden, s.output);
            net.initialize(rng);
            for (double& p : net.params()) p += 0.05 * std::uniform_real_distribution<double>(-1, 1)(rng);
            const std::size_t batch = 3;
            const auto x = randoms(rng, batch * net.input_size());
            const auto coeff = randoms(rng, batch * net.output_size());
            const auto r = oracle::gradient_check(net, x, batch, coeff);
            CHECK(r.param_error < 1e-4);
            CHECK(r.input_error < 1e-4);
        }
    }
}

TEST_CASE("backward accumulates into the parameter gradient") {
    std::mt19937_64 rng(3);
    Mlp net({3, 4, 1}, Activation::relu, Activation::identity);
    net.initialize(rng);
    const auto x = randoms(rng, 3);
    Mlp::Tape tape;
    net.forward(x, 1, tape);
    std::vector<double> g1(net.parameter_count(), 0.0), g2(net.parameter_count(), 0.0);
    const std::vector<double> og{1.0};
    net.backward(tape, og, g1, {});
    net.backward(tape, og, g2, {});
    net.backward(tape, og, g2, {});
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == Approx(2 * g1[i]));
}

TEST_CASE("adam matches hand-computed steps") {
    AdamState st;
    st.lr = 0.1;
    std::vector<double> p{1.0, -2.0};
    std::vector<double> g{0.5, -4.0};
    adam_step(p, g, st);
    // First step: m_hat = g, v_hat = g^2, update = lr * g / (|g| + eps).
    CHECK(p[0] == Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
    CHECK(p[1] == Approx(-2.0 + 0.1 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));

    std::vector<double> g2{1.0, 0.0};
    adam_step(p, g2, st);
    const double m = 0.9 * 0.05 + 0.1 * 1.0;
    const double v = 0.999 * 0.00025 + 0.001 * 1.0;
    const double m_hat = m / (1 - 0.81);
    const double v_hat = v / (1 - 0.999 * 0.999);
    CHECK(p[0] == Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8) - 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8)).epsilon(1e-12));
    CHECK(st.step == 2);
    std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(adam_step(wrong, g, st), std::invalid_argument);
}

TEST_CASE("soft update") {
    std::vector<double> t{1.0, 2.0}, s{3.0, -2.0};
    soft_update(t, s, 0.25);
    CHECK(t[0] == Approx(1.5));
    CHECK(t[1] == Approx(1.0));
    soft_update(t, s, 0.0);
    CHECK(t[0] == Approx(1.5));
    soft_update(t, s, 1.0);
    CHECK(t == s);
}

TEST_CASE("save and load are bit exact") {
    std::mt19937_64 rng(4);
    Mlp net({6, 9, 2}, Activation::relu, Activation::tanh);
    net.initialize(rng, 0.3);
    AdamState st;
    std::vector<double> g(net.parameter_count(), 0.1);
    adam_step(net.params(), g, st);

    std::stringstream buf;
    cnav::io::BinaryWriter w(buf);
    net.save(w);
    st.save(w);
    cnav::io::BinaryReader r(buf);
    const Mlp back = Mlp::load(r);
    const AdamState st_back = AdamState::load(r);
    CHECK(back == net);
    CHECK(st_back == st);
}
