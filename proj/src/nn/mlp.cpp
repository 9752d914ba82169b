#include "cnav/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cnav/simd/kernels.hpp"

namespace cnav::nn {

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output)
    : sizes_(std::move(layer_sizes)), hidden_(hidden), output_(output) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least an input and an output layer");
    if (std::any_of(sizes_.begin(), sizes_.end(), [](std::size_t s) { return s == 0; })) {
        throw std::invalid_argument("Mlp: layer sizes must be positive");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total);
        total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::initialize(std::mt19937_64& rng, double output_scale) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const double fan_in = static_cast<double>(sizes_[l]);
        double bound = std::sqrt(6.0 / fan_in);
        if (l + 1 == num_layers()) bound = output_scale / std::sqrt(fan_in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        const std::size_t n = sizes_[l] * sizes_[l + 1];
        for (std::size_t i = 0; i < n; ++i) params_[weight_offset(l) + i] = dist(rng);
        std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(bias_offset(l)), sizes_[l + 1], 0.0);
    }
}

std::span<const double> Mlp::forward(std::span<const double> inputs, std::size_t batch, Tape& tape) const {
    if (inputs.size() != batch * input_size()) throw std::invalid_argument("Mlp::forward: input shape mismatch");
    const auto& k = simd::active_kernels();
    tape.batch = batch;
    tape.values.resize(sizes_.size());
    tape.values[0].assign(inputs.begin(), inputs.end());
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        const double* bias = params_.data() + bias_offset(l);
        const Activation act = activation_of(l);
        const std::vector<double>& x = tape.values[l];
        std::vector<double>& y = tape.values[l + 1];
        y.resize(batch * out);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* xb = x.data() + b * in;
            double* yb = y.data() + b * out;
            for (std::size_t o = 0; o < out; ++o) {
                const double z = k.dot(w + o * in, xb, in) + bias[o];
                switch (act) {
                    case Activation::identity: yb[o] = z; break;
                    case Activation::relu: yb[o] = z > 0.0 ? z : 0.0; break;
                    case Activation::tanh: yb[o] = std::tanh(z); break;
                }
            }
        }
    }
    return tape.values.back();
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    Tape tape;
    const auto out = forward(input, 1, tape);
    return {out.begin(), out.end()};
}

void Mlp::backward(const Tape& tape, std::span<const double> output_grad, std::span<double> param_grad,
                   std::span<double> input_grad) const {
    const std::size_t batch = tape.batch;
    if (tape.values.size() != sizes_.size()) throw std::invalid_argument("Mlp::backward: tape does not match network");
    if (output_grad.size() != batch * output_size()) throw std::invalid_argument("Mlp::backward: output grad shape mismatch");
    if (!param_grad.empty() && param_grad.size() != params_.size()) {
        throw std::invalid_argument("Mlp::backward: parameter grad shape mismatch");
    }
    if (!input_grad.empty() && input_grad.size() != batch * input_size()) {
        throw std::invalid_argument("Mlp::backward: input grad shape mismatch");
    }
    const auto& k = simd::active_kernels();

    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> prev;
    for (std::size_t l = num_layers(); l-- > 0;) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        const std::vector<double>& y = tape.values[l + 1];
        const std::vector<double>& x = tape.values[l];

        // Through the activation, expressed with the activated output.
        switch (activation_of(l)) {
            case Activation::identity: break;
            case Activation::relu:
                for (std::size_t i = 0; i < delta.size(); ++i) {
                    if (!(y[i] > 0.0)) delta[i] = 0.0;
                }
                break;
            case Activation::tanh:
                for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= 1.0 - y[i] * y[i];
                break;
        }

        if (!param_grad.empty()) {
            double* gw = param_grad.data() + weight_offset(l);
            double* gb = param_grad.data() + bias_offset(l);
            for (std::size_t b = 0; b < batch; ++b) {
                const double* db = delta.data() + b * out;
                const double* xb = x.data() + b * in;
                for (std::size_t o = 0; o < out; ++o) {
                    if (db[o] == 0.0) continue;
                    k.axpy(db[o], xb, gw + o * in, in);
                    gb[o] += db[o];
                }
            }
        }

        const bool need_prev = l > 0 || !input_grad.empty();
        if (!need_prev) break;
        prev.assign(batch * in, 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* db = delta.data() + b * out;
            double* pb = prev.data() + b * in;
            for (std::size_t o = 0; o < out; ++o) {
                if (db[o] == 0.0) continue;
                k.axpy(db[o], w + o * in, pb, in);
            }
        }
        delta.swap(prev);
    }
    if (!input_grad.empty()) std::copy(delta.begin(), delta.end(), input_grad.begin());
}

void Mlp::save(io::BinaryWriter& out) const {
    out.u64(sizes_.size());
    for (std::size_t s : sizes_) out.u64(s);
    out.u64(static_cast<std::uint64_t>(hidden_));
    out.u64(static_cast<std::uint64_t>(output_));
    out.f64s(params_);
}

Mlp Mlp::load(io::BinaryReader& in) {
    const std::uint64_t n = in.u64();
    if (n < 2 || n > 64) throw io::FormatError("Mlp: bad layer count");
    std::vector<std::size_t> sizes(n);
    for (auto& s : sizes) s = in.u64();
    const auto hidden = static_cast<Activation>(in.u64());
    const auto output = static_cast<Activation>(in.u64());
    Mlp net(sizes, hidden, output);
    std::vector<double> params = in.f64s();
    if (params.size() != net.params_.size()) throw io::FormatError("Mlp: parameter count mismatch");
    net.params_ = std::move(params);
    return net;
}

void AdamState::save(io::BinaryWriter& out) const {
    out.f64(lr);
    out.f64(beta1);
    out.f64(beta2);
    out.f64(eps);
    out.i64(step);
    out.f64s(m);
    out.f64s(v);
}

AdamState AdamState::load(io::BinaryReader& in) {
    AdamState s;
    s.lr = in.f64();
    s.beta1 = in.f64();
    s.beta2 = in.f64();
    s.eps = in.f64();
    s.step = in.i64();
    s.m = in.f64s();
    s.v = in.f64s();
    return s;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: shape mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: optimiser state shape mismatch");
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

void soft_update(std::span<double> target, std::span<const double> source, double tau) {
    if (target.size() != source.size()) throw std::invalid_argument("soft_update: shape mismatch");
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = tau * source[i] + (1.0 - tau) * target[i];
}

}  // namespace cnav::nn
