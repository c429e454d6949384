#include <doctest.h>

#include <cmath>

#include "cfmec/adam.hpp"

using namespace cfmec;
using namespace cfmec::rl;

namespace {

MlpParams<double> small_net()
{
    Rng rng(1);
    const std::vector<int> sizes{2, 3, 1};
    return make_mlp<double>(sizes, OutputActivation::identity, rng);
}

ParamGrads<double> filled(const MlpParams<double>& p, double v)
{
    auto g = zero_grads_like(p);
    for (auto& l : g) {
        l.weight.setConstant(v);
        l.bias.setConstant(v);
    }
    return g;
}

// Scalar Adam written out longhand.
struct ScalarAdam {
    double m = 0, v = 0, lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    long t = 0;
    double step(double g)
    {
        ++t;
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mh = m / (1 - std::pow(b1, static_cast<double>(t)));
        const double vh = v / (1 - std::pow(b2, static_cast<double>(t)));
        return -lr * mh / (std::sqrt(vh) + eps);
    }
};

}  // namespace

TEST_CASE("first Adam step moves every parameter by about lr")
{
    auto p = small_net();
    const auto before = p.flatten();
    auto st = make_adam(p, 1e-3);
    adam_step(st, p, filled(p, 1.0));
    const auto after = p.flatten();
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(before[i] - after[i] == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(st.step == 1);
}

TEST_CASE("zero gradient leaves parameters and decays moments")
{
    auto p = small_net();
    auto st = make_adam(p, 1e-3);
    adam_step(st, p, filled(p, 2.0));
    const auto before = p.flatten();
    const double m0 = st.m[0].weight(0, 0), v0 = st.v[0].weight(0, 0);
    adam_step(st, p, filled(p, 0.0));
    const auto after = p.flatten();
    CHECK(st.m[0].weight(0, 0) == doctest::Approx(0.9 * m0));
    CHECK(st.v[0].weight(0, 0) == doctest::Approx(0.999 * v0));
    // The bias-corrected first moment is still nonzero, so the step is not
    // zero; with a fresh optimizer it would be.
    auto fresh = small_net();
    auto st2 = make_adam(fresh, 1e-3);
    const auto f0 = fresh.flatten();
    adam_step(st2, fresh, filled(fresh, 0.0));
    CHECK(fresh.flatten() == f0);
    CHECK(after != before);
}

TEST_CASE("Adam follows the scalar recurrence")
{
    auto p = small_net();
    auto st = make_adam(p, 1e-4);
    ScalarAdam ref{.lr = 1e-4};
    const double g[] = {1.0, 1.0, -0.5, 3.0, 0.0, 2.0};
    double prev_update = INFINITY;
    for (int i = 0; i < 6; ++i) {
        const double before = p.layers[0].weight(1, 1);
        adam_step(st, p, filled(p, g[i]));
        const double expected = ref.step(g[i]);
        CHECK(p.layers[0].weight(1, 1) - before == doctest::Approx(expected).epsilon(1e-9));
        if (i == 1)
            CHECK(std::abs(expected) <= prev_update);
        prev_update = std::abs(expected);
    }
}
