#include "cfmec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmec::baselines {

void FpcConfig::validate() const
{
    if (!(p0_w > 0.0))
        throw std::invalid_argument("fpc: p0 must be positive");
    if (!(nu >= 0.0))
        throw std::invalid_argument("fpc: nu must be non-negative");
}

double fpc_power(double lambda, const FpcConfig& cfg, double p_max_w)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("fpc: aggregate gain must be positive");
    return std::min(p_max_w, cfg.p0_w * std::pow(lambda, -cfg.nu));
}

double cluster_gain(const phy::NetworkScenario& scenario, std::size_t user)
{
    double lambda = 0.0;
    for (int m : scenario.clusters.at(user))
        lambda += scenario.beta(m, static_cast<Eigen::Index>(user));
    return lambda;
}

namespace {

double fpc_eta(const phy::NetworkScenario& scenario, std::size_t user, const SystemConfig& cfg,
               const FpcConfig& fpc)
{
    const double p_max = cfg.radio.max_ul_power_w;
    return fpc_power(cluster_gain(scenario, user), fpc, p_max) / p_max;
}

}  // namespace

env::Action offloading_first_action(const env::Observation&, const phy::NetworkScenario& scenario,
                                    std::size_t user, const SystemConfig& cfg,
                                    const FpcConfig& fpc)
{
    return {0.0, fpc_eta(scenario, user, cfg, fpc)};
}

env::Action local_first_action(const env::Observation&, const phy::NetworkScenario& scenario,
                               std::size_t user, const SystemConfig& cfg, const FpcConfig& fpc)
{
    return {1.0, fpc_eta(scenario, user, cfg, fpc)};
}

}  // namespace cfmec::baselines
