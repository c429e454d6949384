#include <doctest.h>

#include <cmath>

#include "cfmec/baselines.hpp"
#include "cfmec/compute.hpp"
#include "cfmec/env.hpp"
#include "oracles.hpp"

using namespace cfmec;
using namespace cfmec::baselines;

TEST_CASE("fractional power control")
{
    const FpcConfig fpc;
    CHECK(fpc.p0_w == doctest::Approx(std::pow(10.0, -3.5) * 1e-3).epsilon(1e-12));
    CHECK(fpc_power(1e-10, fpc, 0.1) == doctest::Approx(0.0316227766).epsilon(1e-9));

    SUBCASE("nu = 0 ignores the channel")
    {
        const FpcConfig flat{2e-3, 0.0};
        CHECK(fpc_power(1e-12, flat, 0.1) == 2e-3);
        CHECK(fpc_power(1e-3, flat, 0.1) == 2e-3);
        CHECK(fpc_power(1e-3, FpcConfig{0.5, 0.0}, 0.1) == 0.1);
    }
    SUBCASE("weak channels clamp at the power cap")
    {
        CHECK(fpc_power(1e-14, fpc, 0.1) == 0.1);
        CHECK(fpc_power(1e-20, fpc, 0.1) == 0.1);
    }
    SUBCASE("nonincreasing in the aggregate gain")
    {
        double prev = fpc_power(1e-16, fpc, 0.1);
        for (double e = -16.0; e <= -4.0; e += 0.05) {
            const double p = fpc_power(std::pow(10.0, e), fpc, 0.1);
            CHECK(p <= prev);
            CHECK(p > 0.0);
            CHECK(p <= 0.1);
            prev = p;
        }
    }
    SUBCASE("matches the naive formula")
    {
        Rng rng(12);
        std::uniform_real_distribution<double> le(-14.0, -6.0), lnu(0.0, 1.0), lp(-9.0, -5.0);
        for (int i = 0; i < 200; ++i) {
            const double lambda = std::pow(10.0, le(rng));
            const FpcConfig c{std::pow(10.0, lp(rng)), lnu(rng)};
            CHECK(oracle::rel_err(fpc_power(lambda, c, 0.1), oracle::fpc(lambda, c.p0_w, c.nu, 0.1)) <=
                  1e-10);
        }
    }
    SUBCASE("invalid inputs")
    {
        CHECK_THROWS_AS(fpc_power(0.0, fpc, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(fpc_power(-1.0, fpc, 0.1), std::invalid_argument);
        CHECK_THROWS_AS((FpcConfig{0.0, 0.5}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((FpcConfig{1e-6, -0.1}.validate()), std::invalid_argument);
    }
}

TEST_CASE("heuristic actions")
{
    SystemConfig cfg;
    cfg.geometry.num_aps = 40;
    cfg.geometry.num_users = 5;
    const auto scenario = phy::generate_scenario(cfg, 4);
    const FpcConfig fpc;

    for (std::size_t k = 0; k < 5; ++k) {
        const double lambda = cluster_gain(scenario, k);
        double sum = 0.0;
        for (int m : scenario.clusters[k])
            sum += scenario.beta(m, static_cast<Eigen::Index>(k));
        CHECK(lambda == sum);
        const double eta = fpc_power(lambda, fpc, cfg.radio.max_ul_power_w) / cfg.radio.max_ul_power_w;

        env::Observation small, big;
        small.task_bits = 2500;
        big.task_bits = 7500;
        const auto o1 = offloading_first_action(small, scenario, k, cfg, fpc);
        const auto o2 = offloading_first_action(big, scenario, k, cfg, fpc);
        CHECK(o1.alpha == 0.0);
        CHECK(o1.eta == eta);
        CHECK(o2.eta == o1.eta);
        const auto l = local_first_action(big, scenario, k, cfg, fpc);
        CHECK(l.alpha == 1.0);
        CHECK(l.eta == eta);
    }
}

TEST_CASE("local-first split")
{
    const SystemConfig cfg;
    // 2000 bits fit locally within 1 ms at full speed.
    const auto fit = compute::split_task(2000, 1.0, 1e-3, cfg.compute);
    CHECK(fit.local_bits == 2000);
    CHECK(fit.offload_bits == 0);
    const auto fit_off = compute::offload_cost(fit.offload_bits, 1e7, 1e11, 0.0316, cfg.compute);
    CHECK(fit_off.energy_j == 0.0);

    const auto over = compute::split_task(7500, 1.0, 1e-3, cfg.compute);
    CHECK(over.local_bits == doctest::Approx(2000).epsilon(1e-12));
    CHECK(over.offload_bits == doctest::Approx(5500).epsilon(1e-12));
    // The local leg never exceeds the deadline.
    CHECK(compute::local_cost(over, 1e-3, cfg.compute).time_s <= 1e-3);

    // Offloading-first with nothing to send spends nothing.
    const auto none = compute::split_task(0, 0.0, 1e-3, cfg.compute);
    const auto none_off = compute::offload_cost(none.offload_bits, 1e7, 1e11, 0.0316, cfg.compute);
    const auto none_loc = compute::local_cost(none, 1e-3, cfg.compute);
    CHECK(compute::combine(none, none_loc, none_off, 1e-3).e_total_j == 0.0);
}
