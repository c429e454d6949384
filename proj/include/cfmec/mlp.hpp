#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cfmec/rng.hpp"

namespace cfmec::rl {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class OutputActivation { identity, sigmoid };

template <class T>
struct DenseLayer {
    Mat<T> weight;  // out x in
    Vec<T> bias;    // out
};

/// Fully connected net: ReLU on every hidden layer, identity or logistic on
/// the output. Batches are stored column-wise (features x samples).
template <class T>
struct MlpParams {
    std::vector<DenseLayer<T>> layers;
    OutputActivation output = OutputActivation::identity;

    std::vector<int> sizes() const;
    int input_dim() const { return static_cast<int>(layers.front().weight.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().weight.rows()); }
    std::size_t num_parameters() const;

    /// Weights (column-major) then bias, layer by layer.
    std::vector<T> flatten() const;
    void assign(std::span<const T> flat);
};

/// Gradients share the parameter layout.
template <class T>
using ParamGrads = std::vector<DenseLayer<T>>;

template <class T>
struct MlpCache {
    /// activations[0] is the input, activations.back() the output.
    std::vector<Mat<T>> activations;

    const Mat<T>& output() const { return activations.back(); }
};

template <class T>
struct MlpBackward {
    ParamGrads<T> params;
    Mat<T> input_grad;
};

/// Uniform(+-1/sqrt(fan_in)) init; the last layer is additionally scaled by
/// `final_scale`.
template <class T>
MlpParams<T> make_mlp(std::span<const int> sizes, OutputActivation output, Rng& rng,
                      double final_scale = 1.0);

template <class T>
MlpCache<T> mlp_forward(const MlpParams<T>& params, const Mat<T>& input);

template <class T>
Vec<T> mlp_predict(const MlpParams<T>& params, std::span<const T> input);

/// Exact gradients of a scalar objective given d(objective)/d(output).
/// With `param_grads` false only the input gradient is produced.
template <class T>
MlpBackward<T> mlp_backward(const MlpParams<T>& params, const MlpCache<T>& cache,
                            const Mat<T>& output_grad, bool param_grads = true);

template <class T>
ParamGrads<T> zero_grads_like(const MlpParams<T>& params);

template <class T>
double grad_norm(const ParamGrads<T>& grads);

/// target <- tau * main + (1 - tau) * target
template <class T>
void soft_update(MlpParams<T>& target, const MlpParams<T>& main, double tau);

template <class U, class T>
MlpParams<U> cast_params(const MlpParams<T>& p)
{
    MlpParams<U> out;
    out.output = p.output;
    for (const auto& l : p.layers)
        out.layers.push_back({l.weight.template cast<U>(), l.bias.template cast<U>()});
    return out;
}

}  // namespace cfmec::rl
