#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cnav/io/binary_io.hpp"

namespace cnav::nn {

enum class Activation : std::uint8_t { identity, relu, tanh };

/// Dense feed-forward network, double precision. All parameters live in one
/// flat buffer: per layer the row-major (out x in) weight block, then the bias.
class Mlp {
public:
    /// Intermediate values of a batched forward pass, consumed by backward().
    struct Tape {
        std::size_t batch{0};
        /// values[0] is the input; values[l + 1] the activated output of layer l.
        std::vector<std::vector<double>> values;
    };

    Mlp() = default;
    Mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output);

    /// He-uniform fan-in initialisation with zero biases; the last layer's
    /// weights are additionally multiplied by output_scale.
    void initialize(std::mt19937_64& rng, double output_scale = 1.0);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t num_layers() const { return sizes_.size() - 1; }
    Activation hidden_activation() const { return hidden_; }
    Activation output_activation() const { return output_; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Forward pass over `batch` row-major inputs; the returned view aliases
    /// the tape's final layer.
    std::span<const double> forward(std::span<const double> inputs, std::size_t batch, Tape& tape) const;

    /// Single-sample convenience wrapper.
    std::vector<double> forward(std::span<const double> input) const;

    /// Reverse-mode pass. Accumulates into param_grad (skipped when empty)
    /// and writes the gradient w.r.t. the inputs into input_grad (skipped when
    /// empty). output_grad is batch x output_size.
    void backward(const Tape& tape, std::span<const double> output_grad, std::span<double> param_grad,
                  std::span<double> input_grad) const;

    void save(io::BinaryWriter& out) const;
    static Mlp load(io::BinaryReader& in);

    bool operator==(const Mlp&) const = default;

private:
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + sizes_[layer] * sizes_[layer + 1]; }
    Activation activation_of(std::size_t layer) const { return layer + 1 == num_layers() ? output_ : hidden_; }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    Activation hidden_{Activation::relu};
    Activation output_{Activation::identity};
    std::vector<double> params_;
};

/// Adam optimiser state, shape-matched to one parameter buffer.
struct AdamState {
    double lr{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double eps{1e-8};
    std::int64_t step{0};
    std::vector<double> m;
    std::vector<double> v;

    void save(io::BinaryWriter& out) const;
    static AdamState load(io::BinaryReader& in);

    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update of params using grads.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(std::span<double> target, std::span<const double> source, double tau);

}  // namespace cnav::nn
