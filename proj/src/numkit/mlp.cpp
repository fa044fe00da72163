#include "oprlab/numkit/mlp.hpp"

#include <cmath>
#include <cstring>

#include "oprlab/errors.hpp"
#include "oprlab/kernels.hpp"

namespace oprlab::numkit {

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw ConfigError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
    return a == Activation::tanh ? "tanh" : "relu";
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

static void check_layer_sizes(const std::vector<std::size_t>& sizes) {
    if (sizes.size() < 2) throw ShapeError("mlp needs at least input and output layers");
    for (std::size_t s : sizes) {
        if (s == 0) throw ShapeError("mlp layer size must be positive");
    }
}

MlpParams MlpParams::zeros(std::vector<std::size_t> layer_sizes, Activation act) {
    check_layer_sizes(layer_sizes);
    MlpParams p;
    p.layer_sizes = std::move(layer_sizes);
    p.activation = act;
    for (std::size_t i = 0; i + 1 < p.layer_sizes.size(); ++i) {
        p.weights.emplace_back(p.layer_sizes[i + 1], p.layer_sizes[i]);
        p.biases.emplace_back(p.layer_sizes[i + 1], 0.0);
    }
    return p;
}

MlpParams MlpParams::glorot(std::vector<std::size_t> layer_sizes, Activation act,
                            rng::Engine& engine, double final_layer_scale) {
    MlpParams p = zeros(std::move(layer_sizes), act);
    for (std::size_t i = 0; i < p.num_layers(); ++i) {
        const double fan_in = static_cast<double>(p.layer_sizes[i]);
        const double fan_out = static_cast<double>(p.layer_sizes[i + 1]);
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        if (i + 1 == p.num_layers()) limit *= final_layer_scale;
        for (double& w : p.weights[i].data) w = engine.uniform(-limit, limit);
    }
    return p;
}

void MlpGrads::zero() {
    for (auto& w : weights) w.zero();
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

std::size_t MlpGrads::param_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

MlpGrads grads_like(const MlpParams& params) {
    MlpGrads g;
    for (const auto& w : params.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void mlp_forward(const MlpParams& params, std::span<const double> input,
                 ForwardCache& cache, std::vector<double>& output) {
    const std::size_t layers = params.num_layers();
    if (input.size() != params.input_dim()) {
        throw ShapeError("mlp_forward: input length " + std::to_string(input.size()) +
                         " != " + std::to_string(params.input_dim()));
    }
    cache.pre.resize(layers);
    cache.post.resize(layers + 1);
    cache.post[0].assign(input.begin(), input.end());

    const auto& k = kernels::ops();
    for (std::size_t i = 0; i < layers; ++i) {
        const Matrix& w = params.weights[i];
        auto& pre = cache.pre[i];
        pre.resize(w.rows);
        k.matvec(w.data.data(), cache.post[i].data(), params.biases[i].data(),
                 pre.data(), w.rows, w.cols);
        auto& post = cache.post[i + 1];
        post.resize(w.rows);
        if (i + 1 == layers) {
            post = pre;  // linear output layer
        } else if (params.activation == Activation::tanh) {
            for (std::size_t j = 0; j < pre.size(); ++j) post[j] = std::tanh(pre[j]);
        } else {
            for (std::size_t j = 0; j < pre.size(); ++j) post[j] = pre[j] > 0.0 ? pre[j] : 0.0;
        }
    }
    output = cache.post[layers];
}

void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> output_grad, MlpGrads& acc,
                  std::vector<double>* input_grad,
                  std::span<const double> hidden_inject) {
    const std::size_t layers = params.num_layers();
    if (output_grad.size() != params.output_dim()) {
        throw ShapeError("mlp_backward: output_grad length mismatch");
    }
    if (cache.post.size() != layers + 1 || cache.pre.size() != layers ||
        cache.post[0].size() != params.input_dim()) {
        throw ShapeError("mlp_backward: stale or mismatched forward cache");
    }
    if (!hidden_inject.empty()) {
        if (layers < 2) throw ShapeError("mlp_backward: hidden_inject needs a hidden layer");
        if (hidden_inject.size() != cache.post[layers - 1].size()) {
            throw ShapeError("mlp_backward: hidden_inject length mismatch");
        }
    }
    if (acc.weights.size() != layers) throw ShapeError("mlp_backward: grads shape mismatch");

    const auto& k = kernels::ops();
    std::vector<double> dpost(output_grad.begin(), output_grad.end());
    std::vector<double> dpre;
    for (std::size_t step = 0; step < layers; ++step) {
        const std::size_t i = layers - 1 - step;
        const Matrix& w = params.weights[i];
        if (dpost.size() != w.rows || cache.post[i].size() != w.cols ||
            cache.pre[i].size() != w.rows) {
            throw ShapeError("mlp_backward: cache/params mismatch at layer " +
                             std::to_string(i));
        }

        if (i + 1 == layers) {
            dpre = dpost;  // linear output
        } else {
            dpre.resize(w.rows);
            const auto& post = cache.post[i + 1];
            const auto& pre = cache.pre[i];
            if (params.activation == Activation::tanh) {
                for (std::size_t j = 0; j < w.rows; ++j) {
                    dpre[j] = dpost[j] * (1.0 - post[j] * post[j]);
                }
            } else {
                for (std::size_t j = 0; j < w.rows; ++j) {
                    dpre[j] = pre[j] > 0.0 ? dpost[j] : 0.0;
                }
            }
        }

        k.rank1_acc(acc.weights[i].data.data(), dpre.data(), cache.post[i].data(),
                    w.rows, w.cols);
        k.axpy(1.0, dpre.data(), acc.biases[i].data(), w.rows);

        if (i > 0 || input_grad) {
            dpost.resize(w.cols);
            k.matvec_t(w.data.data(), dpre.data(), dpost.data(), w.rows, w.cols);
            if (i == layers - 1 && !hidden_inject.empty()) {
                k.axpy(1.0, hidden_inject.data(), dpost.data(), dpost.size());
            }
        }
    }
    if (input_grad) *input_grad = dpost;
}

}  // namespace oprlab::numkit
