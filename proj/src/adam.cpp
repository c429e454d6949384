#include "cfmec/adam.hpp"

#include <cassert>
#include <cmath>

namespace cfmec::rl {

template <class T>
AdamState<T> make_adam(const MlpParams<T>& params, double lr)
{
    AdamState<T> s;
    s.m = zero_grads_like(params);
    s.v = zero_grads_like(params);
    s.lr = lr;
    return s;
}

namespace {

template <class Param, class Grad, class Moment>
void adam_update(Param& p, const Grad& g, Moment& m, Moment& v, const AdamState<typename Param::Scalar>& s,
                 double step_size)
{
    using T = typename Param::Scalar;
    const T b1 = static_cast<T>(s.beta1);
    const T b2 = static_cast<T>(s.beta2);
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.cwiseProduct(g);
    const T bias2 = static_cast<T>(std::sqrt(1.0 - std::pow(s.beta2, static_cast<double>(s.step))));
    // lr * m_hat / (sqrt(v_hat) + eps) with the corrections folded into step_size and bias2
    p.array() -= static_cast<T>(step_size) * m.array() /
                 (v.array().sqrt() / bias2 + static_cast<T>(s.eps));
}

}  // namespace

template <class T>
void adam_step(AdamState<T>& state, MlpParams<T>& params, const ParamGrads<T>& grads)
{
    assert(grads.size() == params.layers.size());
    ++state.step;
    const double step_size =
        state.lr / (1.0 - std::pow(state.beta1, static_cast<double>(state.step)));
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        adam_update(params.layers[i].weight, grads[i].weight, state.m[i].weight, state.v[i].weight,
                    state, step_size);
        adam_update(params.layers[i].bias, grads[i].bias, state.m[i].bias, state.v[i].bias, state,
                    step_size);
    }
}

template AdamState<float> make_adam<float>(const MlpParams<float>&, double);
template AdamState<double> make_adam<double>(const MlpParams<double>&, double);
template void adam_step<float>(AdamState<float>&, MlpParams<float>&, const ParamGrads<float>&);
template void adam_step<double>(AdamState<double>&, MlpParams<double>&, const ParamGrads<double>&);

}  // namespace cfmec::rl
