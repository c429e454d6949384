#pragma once

#include <cstddef>

#include "cfmec/compute.hpp"
#include "cfmec/phy.hpp"

namespace cfmec {

struct GeometryConfig {
    int num_aps = 100;
    int num_users = 10;
    double area_side_km = 1.0;
    double cluster_fraction = 0.3;
    /// Explicit cluster size C_max; 0 derives it from cluster_fraction.
    int max_cluster_size = 0;

    std::size_t cluster_size() const;
    void validate() const;
};

struct EnvConfig {
    int horizon = 100;
    /// Reference SINR whose Shannon rate normalizes the previous-rate observation.
    double rate_ref_sinr = 1e3;
};

/// Every physical and compute constant of the simulated network, SI units.
struct SystemConfig {
    GeometryConfig geometry;
    phy::PathLossConstants path_loss;
    phy::RadioConfig radio;
    compute::ComputeConfig compute;
    EnvConfig env;

    std::size_t num_users() const { return static_cast<std::size_t>(geometry.num_users); }
    void validate() const;
};

}  // namespace cfmec
