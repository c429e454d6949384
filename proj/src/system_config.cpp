#include "cfmec/system_config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfmec {

std::size_t GeometryConfig::cluster_size() const
{
    if (max_cluster_size > 0)
        return static_cast<std::size_t>(max_cluster_size);
    const auto n = std::llround(cluster_fraction * num_aps);
    return static_cast<std::size_t>(std::max<long long>(1, n));
}

void GeometryConfig::validate() const
{
    if (num_users < 1)
        throw std::invalid_argument("geometry: need at least one user");
    if (num_aps < num_users)
        throw std::invalid_argument("geometry: number of APs must be at least the number of users");
    if (!(area_side_km > 0.0))
        throw std::invalid_argument("geometry: area side must be positive");
    if (!(cluster_fraction > 0.0 && cluster_fraction <= 1.0))
        throw std::invalid_argument("geometry: cluster fraction must lie in (0, 1]");
    if (max_cluster_size < 0 || max_cluster_size > num_aps)
        throw std::invalid_argument("geometry: cluster size " + std::to_string(max_cluster_size) +
                                    " exceeds the number of APs");
}

void SystemConfig::validate() const
{
    geometry.validate();
    path_loss.validate();
    radio.validate(num_users());
    compute.validate(num_users());
    if (env.horizon < 1)
        throw std::invalid_argument("env: horizon must be at least one step");
    if (!(env.rate_ref_sinr > 0.0))
        throw std::invalid_argument("env: rate reference SINR must be positive");
}

}  // namespace cfmec
