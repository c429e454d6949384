#pragma once

#include "cfmec/mlp.hpp"

namespace cfmec::rl {

template <class T>
struct AdamState {
    ParamGrads<T> m;
    ParamGrads<T> v;
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <class T>
AdamState<T> make_adam(const MlpParams<T>& params, double lr);

/// Bias-corrected Adam descent step.
template <class T>
void adam_step(AdamState<T>& state, MlpParams<T>& params, const ParamGrads<T>& grads);

}  // namespace cfmec::rl
