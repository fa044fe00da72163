#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "oprlab/numkit/matrix.hpp"
#include "oprlab/rng.hpp"

namespace oprlab::numkit {

enum class Activation { tanh, relu };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

// Fully connected net: hidden layers use the configured activation, the
// output layer is linear. weights[i] maps layer i (size layer_sizes[i]) to
// layer i+1 and has shape layer_sizes[i+1] x layer_sizes[i].
struct MlpParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    Activation activation = Activation::tanh;

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }
    std::size_t param_count() const;

    static MlpParams zeros(std::vector<std::size_t> layer_sizes,
                           Activation act = Activation::tanh);

    // Per-layer uniform init in +/- sqrt(6 / (fan_in + fan_out)); the last
    // layer is additionally scaled by final_layer_scale.
    static MlpParams glorot(std::vector<std::size_t> layer_sizes, Activation act,
                            rng::Engine& engine, double final_layer_scale = 1.0);
};

// Gradient (or moment) container shaped like an MlpParams.
struct MlpGrads {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    void zero();
    std::size_t param_count() const;
};

MlpGrads grads_like(const MlpParams& params);

// Pre- and post-activation trace from a forward pass. post[0] is the input;
// post[i+1] is the output of layer i after activation (identity on the last).
struct ForwardCache {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
};

// output = net(input); cache filled for a later backward pass. Throws
// ShapeError on dimension mismatch.
void mlp_forward(const MlpParams& params, std::span<const double> input,
                 ForwardCache& cache, std::vector<double>& output);

// Accumulates d(loss)/d(params) into acc given d(loss)/d(output). The cache
// must come from mlp_forward on the same params. Optionally also emits
// d(loss)/d(input) and accepts an extra gradient injected at the last hidden
// layer's post-activation (used by shared-trunk agents).
void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> output_grad, MlpGrads& acc,
                  std::vector<double>* input_grad = nullptr,
                  std::span<const double> hidden_inject = {});

}  // namespace oprlab::numkit
