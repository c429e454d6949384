#pragma once

#include <vector>

#include "cfmec/env.hpp"
#include "cfmec/phy.hpp"
#include "cfmec/system_config.hpp"

namespace cfmec::baselines {

/// Open-loop fractional power control p = min(p_max, p0 * lambda^-nu).
struct FpcConfig {
    double p0_w = 1e-3 * 3.1622776601683794e-4;  // -35 dBm
    double nu = 0.5;

    void validate() const;
};

double fpc_power(double lambda, const FpcConfig& cfg, double p_max_w);

/// Aggregate large-scale gain of a user over its serving cluster.
double cluster_gain(const phy::NetworkScenario& scenario, std::size_t user);

/// Full offload (alpha = 0) at the FPC power.
env::Action offloading_first_action(const env::Observation& obs,
                                    const phy::NetworkScenario& scenario, std::size_t user,
                                    const SystemConfig& cfg, const FpcConfig& fpc = {});

/// Full local speed (alpha = 1), remainder offloaded at the FPC power.
env::Action local_first_action(const env::Observation& obs, const phy::NetworkScenario& scenario,
                               std::size_t user, const SystemConfig& cfg,
                               const FpcConfig& fpc = {});

}  // namespace cfmec::baselines
