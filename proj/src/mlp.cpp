#include "cfmec/mlp.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cfmec::rl {

template <class T>
std::vector<int> MlpParams<T>::sizes() const
{
    std::vector<int> s;
    if (layers.empty())
        return s;
    s.push_back(input_dim());
    for (const auto& l : layers)
        s.push_back(static_cast<int>(l.weight.rows()));
    return s;
}

template <class T>
std::size_t MlpParams<T>::num_parameters() const
{
    std::size_t n = 0;
    for (const auto& l : layers)
        n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

template <class T>
std::vector<T> MlpParams<T>::flatten() const
{
    std::vector<T> flat;
    flat.reserve(num_parameters());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weight.data(), l.weight.data() + l.weight.size());
        flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return flat;
}

template <class T>
void MlpParams<T>::assign(std::span<const T> flat)
{
    if (flat.size() != num_parameters())
        throw std::invalid_argument("flat parameter vector has the wrong length");
    auto it = flat.begin();
    for (auto& l : layers) {
        std::copy_n(it, l.weight.size(), l.weight.data());
        it += l.weight.size();
        std::copy_n(it, l.bias.size(), l.bias.data());
        it += l.bias.size();
    }
}

template <class T>
MlpParams<T> make_mlp(std::span<const int> sizes, OutputActivation output, Rng& rng,
                      double final_scale)
{
    if (sizes.size() < 2)
        throw std::invalid_argument("an MLP needs at least an input and an output size");
    MlpParams<T> p;
    p.output = output;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const int fan_in = sizes[i];
        const int fan_out = sizes[i + 1];
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        if (i + 2 == sizes.size())
            bound *= final_scale;
        std::uniform_real_distribution<double> u(-bound, bound);
        DenseLayer<T> l;
        l.weight.resize(fan_out, fan_in);
        l.bias.resize(fan_out);
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
                l.weight(r, c) = static_cast<T>(u(rng));
        for (Eigen::Index r = 0; r < l.bias.size(); ++r)
            l.bias(r) = static_cast<T>(u(rng));
        p.layers.push_back(std::move(l));
    }
    return p;
}

template <class T>
MlpCache<T> mlp_forward(const MlpParams<T>& params, const Mat<T>& input)
{
    assert(input.rows() == params.input_dim());
    MlpCache<T> cache;
    cache.activations.reserve(params.layers.size() + 1);
    cache.activations.push_back(input);
    const std::size_t n = params.layers.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& l = params.layers[i];
        Mat<T> z = l.weight * cache.activations.back();
        z.colwise() += l.bias;
        if (i + 1 < n)
            z = z.cwiseMax(T(0));
        else if (params.output == OutputActivation::sigmoid)
            z = (T(1) + (-z.array()).exp()).inverse().matrix();
        cache.activations.push_back(std::move(z));
    }
    return cache;
}

template <class T>
Vec<T> mlp_predict(const MlpParams<T>& params, std::span<const T> input)
{
    Mat<T> x = Eigen::Map<const Vec<T>>(input.data(), static_cast<Eigen::Index>(input.size()));
    return mlp_forward(params, x).output().col(0);
}

template <class T>
MlpBackward<T> mlp_backward(const MlpParams<T>& params, const MlpCache<T>& cache,
                            const Mat<T>& output_grad, bool param_grads)
{
    const std::size_t n = params.layers.size();
    assert(cache.activations.size() == n + 1);
    assert(output_grad.rows() == cache.output().rows() && output_grad.cols() == cache.output().cols());

    MlpBackward<T> out;
    if (param_grads)
        out.params.resize(n);

    Mat<T> delta = output_grad;
    if (params.output == OutputActivation::sigmoid) {
        const auto& y = cache.output().array();
        delta = (delta.array() * y * (T(1) - y)).matrix();
    }
    for (std::size_t i = n; i-- > 0;) {
        const auto& l = params.layers[i];
        const Mat<T>& a_in = cache.activations[i];
        if (param_grads) {
            out.params[i].weight.noalias() = delta * a_in.transpose();
            out.params[i].bias = delta.rowwise().sum();
        }
        Mat<T> upstream = l.weight.transpose() * delta;
        if (i == 0) {
            out.input_grad = std::move(upstream);
        } else {
            delta = (upstream.array() * (a_in.array() > T(0)).template cast<T>()).matrix();
        }
    }
    return out;
}

template <class T>
ParamGrads<T> zero_grads_like(const MlpParams<T>& params)
{
    ParamGrads<T> g;
    for (const auto& l : params.layers)
        g.push_back({Mat<T>::Zero(l.weight.rows(), l.weight.cols()), Vec<T>::Zero(l.bias.size())});
    return g;
}

template <class T>
double grad_norm(const ParamGrads<T>& grads)
{
    double sq = 0.0;
    for (const auto& l : grads)
        sq += static_cast<double>(l.weight.squaredNorm() + l.bias.squaredNorm());
    return std::sqrt(sq);
}

template <class T>
void soft_update(MlpParams<T>& target, const MlpParams<T>& main, double tau)
{
    assert(target.layers.size() == main.layers.size());
    const T a = static_cast<T>(tau);
    const T b = static_cast<T>(1.0 - tau);
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        target.layers[i].weight = a * main.layers[i].weight + b * target.layers[i].weight;
        target.layers[i].bias = a * main.layers[i].bias + b * target.layers[i].bias;
    }
}

#define CFMEC_INSTANTIATE_MLP(T)                                                              \
    template struct MlpParams<T>;                                                             \
    template MlpParams<T> make_mlp<T>(std::span<const int>, OutputActivation, Rng&, double);  \
    template MlpCache<T> mlp_forward<T>(const MlpParams<T>&, const Mat<T>&);                  \
    template Vec<T> mlp_predict<T>(const MlpParams<T>&, std::span<const T>);                  \
    template MlpBackward<T> mlp_backward<T>(const MlpParams<T>&, const MlpCache<T>&,          \
                                            const Mat<T>&, bool);                             \
    template ParamGrads<T> zero_grads_like<T>(const MlpParams<T>&);                           \
    template double grad_norm<T>(const ParamGrads<T>&);                                       \
    template void soft_update<T>(MlpParams<T>&, const MlpParams<T>&, double);

CFMEC_INSTANTIATE_MLP(float)
CFMEC_INSTANTIATE_MLP(double)

}  // namespace cfmec::rl
