#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "plseg/matrix.hpp"
#include "plseg/rng.hpp"

namespace plseg {

/// Fully-connected classifier parameters. Layer l maps layer_sizes[l]
/// inputs to layer_sizes[l+1] outputs; the last layer emits class logits.
/// Hidden layers use tanh, the output layer is linear.
struct ModelParams {
    std::vector<std::size_t> layer_sizes;  // {F, h1, ..., C}
    std::vector<Matrix> weights;           // per layer, in x out
    std::vector<std::vector<double>> biases;

    std::size_t n_layers() const { return weights.size(); }
    std::size_t input_width() const { return layer_sizes.front(); }
    std::size_t output_width() const { return layer_sizes.back(); }

    void validate() const {
        if (layer_sizes.size() < 2 || weights.size() != layer_sizes.size() - 1 ||
            biases.size() != weights.size())
            throw std::invalid_argument("ModelParams: inconsistent layer bookkeeping");
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (weights[l].rows != layer_sizes[l] || weights[l].cols != layer_sizes[l + 1] ||
                biases[l].size() != layer_sizes[l + 1])
                throw std::invalid_argument("ModelParams: layer shapes do not chain");
        }
    }
};

/// Gradients (and optimizer velocity) share the parameter layout.
using Gradients = ModelParams;

/// All-zero parameter block with the given layer sizes.
inline ModelParams zero_params(const std::vector<std::size_t>& layer_sizes) {
    ModelParams p;
    p.layer_sizes = layer_sizes;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        p.weights.emplace_back(layer_sizes[l], layer_sizes[l + 1]);
        p.biases.emplace_back(layer_sizes[l + 1], 0.0);
    }
    p.validate();
    return p;
}

/// Seeded Glorot-style init: each layer uniform in
/// +-sqrt(6 / (fan_in + fan_out)), biases zero.
inline ModelParams init_params(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    ModelParams p = zero_params(layer_sizes);
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0xC0DE);
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        const double bound =
            std::sqrt(6.0 / static_cast<double>(layer_sizes[l] + layer_sizes[l + 1]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : p.weights[l].data) w = dist(rng);
    }
    return p;
}

/// Activations for every layer; activations[0] is the input batch and
/// activations[L] the logits.
struct ForwardCache {
    std::vector<Matrix> activations;
};

inline ForwardCache forward_cached(const Matrix& features, const ModelParams& params) {
    params.validate();
    if (features.cols != params.input_width())
        throw std::invalid_argument("forward: feature width does not match first layer");
    ForwardCache cache;
    cache.activations.reserve(params.n_layers() + 1);
    cache.activations.push_back(features);
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        Matrix z = matmul(cache.activations.back(), params.weights[l]);
        for (std::size_t i = 0; i < z.rows; ++i) {
            double* zi = z.row(i);
            for (std::size_t j = 0; j < z.cols; ++j) zi[j] += params.biases[l][j];
        }
        if (l + 1 < params.n_layers())
            for (double& v : z.data) v = std::tanh(v);
        cache.activations.push_back(std::move(z));
    }
    return cache;
}

/// Class logits for a feature batch (N x C).
inline Matrix forward(const Matrix& features, const ModelParams& params) {
    return forward_cached(features, params).activations.back();
}

/// Row-wise softmax, max-shifted for stability. Rows sum to 1.
inline Matrix softmax(const Matrix& logits) {
    Matrix probs(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const double* in = logits.row(i);
        double* out = probs.row(i);
        double m = in[0];
        for (std::size_t j = 1; j < logits.cols; ++j) m = std::max(m, in[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) {
            out[j] = std::exp(in[j] - m);
            sum += out[j];
        }
        for (std::size_t j = 0; j < logits.cols; ++j) out[j] /= sum;
    }
    return probs;
}

/// Reverse-mode gradients of a scalar loss with respect to all parameters,
/// given the loss gradient at the logits. Exact backpropagation through
/// the tanh layers.
inline Gradients loss_gradient(const Matrix& features, const ModelParams& params,
                               const Matrix& grad_at_logits) {
    const ForwardCache cache = forward_cached(features, params);
    if (!grad_at_logits.same_shape(cache.activations.back()))
        throw std::invalid_argument("loss_gradient: upstream gradient shape mismatch");

    Gradients grads = zero_params(params.layer_sizes);
    Matrix delta = grad_at_logits;  // gradient at layer output, pre-activation for linear last
    for (std::size_t l = params.n_layers(); l-- > 0;) {
        const Matrix& input = cache.activations[l];
        grads.weights[l] = matmul_at_b(input, delta);
        for (std::size_t i = 0; i < delta.rows; ++i) {
            const double* di = delta.row(i);
            for (std::size_t j = 0; j < delta.cols; ++j) grads.biases[l][j] += di[j];
        }
        if (l == 0) break;
        Matrix prev = matmul_a_bt(delta, params.weights[l]);
        const Matrix& act = cache.activations[l];  // tanh outputs of layer l-1
        for (std::size_t i = 0; i < prev.rows; ++i) {
            double* pi = prev.row(i);
            const double* ai = act.row(i);
            for (std::size_t j = 0; j < prev.cols; ++j) pi[j] *= 1.0 - ai[j] * ai[j];
        }
        delta = std::move(prev);
    }
    return grads;
}

/// One SGD-with-momentum update, in place:
///   velocity <- momentum * velocity + grads
///   params   <- params - learning_rate * velocity
inline void sgd_step(ModelParams& params, const Gradients& grads, Gradients& velocity,
                     double learning_rate, double momentum) {
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("sgd_step: learning rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("sgd_step: momentum must be in [0, 1)");
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].data.size(); ++i) {
            double& v = velocity.weights[l].data[i];
            v = momentum * v + grads.weights[l].data[i];
            params.weights[l].data[i] -= learning_rate * v;
        }
        for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
            double& v = velocity.biases[l][i];
            v = momentum * v + grads.biases[l][i];
            params.biases[l][i] -= learning_rate * v;
        }
    }
}

}  // namespace plseg
