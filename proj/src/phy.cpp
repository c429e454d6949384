#include "cfmec/phy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "cfmec/system_config.hpp"

namespace cfmec::phy {

double distance_km(const Point& a, const Point& b)
{
    return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

void PathLossConstants::validate() const
{
    if (!(carrier_freq_mhz > 0.0) || !(ap_height_m > 0.0) || !(user_height_m > 0.0))
        throw std::invalid_argument("path loss: frequency and antenna heights must be positive");
    if (!(d0_km > 0.0 && d0_km < d1_km))
        throw std::invalid_argument("path loss: need 0 < d0 < d1");
    if (!(shadow_std_db >= 0.0))
        throw std::invalid_argument("path loss: shadowing deviation must be non-negative");
}

double thermal_noise_power_w(double bandwidth_hz, double noise_figure_db)
{
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double RadioConfig::noise_power_w() const
{
    return noise_power_override_w ? *noise_power_override_w
                                  : thermal_noise_power_w(bandwidth_hz, noise_figure_db);
}

int RadioConfig::pilot_length(std::size_t num_users) const
{
    return pilot_len > 0 ? pilot_len : static_cast<int>(num_users);
}

double RadioConfig::prelog(std::size_t num_users) const
{
    if (!apply_prelog)
        return 1.0;
    return static_cast<double>(coherence_samples - pilot_length(num_users)) / coherence_samples;
}

void RadioConfig::validate(std::size_t num_users) const
{
    if (!(bandwidth_hz > 0.0) || !(pilot_power_w > 0.0) || !(max_ul_power_w > 0.0) ||
        !(coherence_ms > 0.0) || !(noise_power_w() > 0.0))
        throw std::invalid_argument("radio: bandwidth, powers and coherence time must be positive");
    if (pilot_len < 0)
        throw std::invalid_argument("radio: negative pilot length");
    if (static_cast<std::size_t>(pilot_length(num_users)) < num_users)
        throw std::invalid_argument("radio: pilot length is shorter than the number of users");
    if (apply_prelog && coherence_samples <= pilot_length(num_users))
        throw std::invalid_argument("radio: coherence interval must exceed the pilot length");
}

std::string_view to_string(Architecture a)
{
    switch (a) {
    case Architecture::cell_free: return "cell_free";
    case Architecture::small_cell: return "small_cell";
    case Architecture::colocated: return "colocated";
    }
    return "?";
}

std::optional<Architecture> parse_architecture(std::string_view s)
{
    for (auto a : {Architecture::cell_free, Architecture::small_cell, Architecture::colocated})
        if (to_string(a) == s)
            return a;
    return std::nullopt;
}

double hata_intercept_db(const PathLossConstants& c)
{
    const double lf = std::log10(c.carrier_freq_mhz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(c.ap_height_m) -
           (1.1 * lf - 0.7) * c.user_height_m + (1.56 * lf - 0.8);
}

double path_loss_db(double d_km, const PathLossConstants& c)
{
    const double l = hata_intercept_db(c);
    if (d_km > c.d1_km)
        return -l - 35.0 * std::log10(d_km);
    if (d_km > c.d0_km)
        return -l - 10.0 * std::log10(d_km * d_km * std::pow(c.d1_km, 1.5));
    return -l - 10.0 * std::log10(c.d0_km * c.d0_km * std::pow(c.d1_km, 1.5));
}

double large_scale_gain(double pl_db, double z, double shadow_std_db, bool apply_shadowing)
{
    const double shadow_db = apply_shadowing ? shadow_std_db * z : 0.0;
    return std::pow(10.0, pl_db / 10.0) * std::pow(10.0, shadow_db / 10.0);
}

std::vector<std::vector<int>> form_clusters(const Eigen::MatrixXd& beta, std::size_t size)
{
    const auto m_aps = static_cast<std::size_t>(beta.rows());
    if (size > m_aps)
        throw std::invalid_argument("cluster size exceeds the number of APs");
    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(beta.cols()));
    std::vector<int> order(m_aps);
    for (Eigen::Index k = 0; k < beta.cols(); ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return beta(a, k) > beta(b, k); });
        clusters[static_cast<std::size_t>(k)].assign(order.begin(),
                                                     order.begin() + static_cast<long>(size));
    }
    return clusters;
}

NetworkScenario generate_scenario(const SystemConfig& config, std::uint64_t seed)
{
    const auto& geo = config.geometry;
    geo.validate();
    config.path_loss.validate();
    config.radio.validate(config.num_users());

    Rng rng = make_rng(seed, Stream::scenario);
    std::uniform_real_distribution<double> coord(0.0, geo.area_side_km);
    std::normal_distribution<double> normal(0.0, 1.0);

    NetworkScenario s;
    s.area_side_km = geo.area_side_km;
    s.seed = seed;
    s.ap_positions.resize(static_cast<std::size_t>(geo.num_aps));
    s.user_positions.resize(static_cast<std::size_t>(geo.num_users));
    for (auto& p : s.ap_positions) {
        p.x_km = coord(rng);
        p.y_km = coord(rng);
    }
    for (auto& p : s.user_positions) {
        p.x_km = coord(rng);
        p.y_km = coord(rng);
    }

    const auto& pl = config.path_loss;
    s.beta.resize(geo.num_aps, geo.num_users);
    for (int k = 0; k < geo.num_users; ++k) {
        for (int m = 0; m < geo.num_aps; ++m) {
            const double d = std::max(distance_km(s.ap_positions[static_cast<std::size_t>(m)],
                                                  s.user_positions[static_cast<std::size_t>(k)]),
                                      1e-9);
            const double z = normal(rng);
            s.beta(m, k) = large_scale_gain(path_loss_db(d, pl), z, pl.shadow_std_db, d > pl.d1_km);
        }
    }
    s.clusters = form_clusters(s.beta, geo.cluster_size());
    return s;
}

ChannelRealization draw_channels(const NetworkScenario& scenario, const RadioConfig& radio,
                                 Rng& rng)
{
    const auto m_aps = static_cast<Eigen::Index>(scenario.num_aps());
    const auto k_users = static_cast<Eigen::Index>(scenario.num_users());
    const double est_var =
        radio.noise_power_w() / (radio.pilot_length(scenario.num_users()) * radio.pilot_power_w);
    const double est_scale = std::sqrt(est_var / 2.0);
    const double fade_scale = std::sqrt(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);

    ChannelRealization ch;
    ch.h.resize(m_aps, k_users);
    ch.g.resize(m_aps, k_users);
    ch.g_hat.resize(m_aps, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        for (Eigen::Index m = 0; m < m_aps; ++m) {
            const double hr = normal(rng);
            const double hi = normal(rng);
            const double er = normal(rng);
            const double ei = normal(rng);
            const std::complex<double> h{fade_scale * hr, fade_scale * hi};
            const std::complex<double> g = std::sqrt(scenario.beta(m, k)) * h;
            ch.h(m, k) = h;
            ch.g(m, k) = g;
            ch.g_hat(m, k) = g + std::complex<double>{est_scale * er, est_scale * ei};
        }
    }
    return ch;
}

std::vector<double> uplink_sinr(std::span<const double> powers_w, const ChannelRealization& ch,
                                const std::vector<std::vector<int>>& clusters,
                                double noise_power_w)
{
    const auto k_users = static_cast<std::size_t>(ch.g.cols());
    std::vector<double> sinr(k_users, 0.0);
    Eigen::VectorXcd coupling(static_cast<Eigen::Index>(k_users));
    for (std::size_t k = 0; k < k_users; ++k) {
        if (powers_w[k] <= 0.0)
            continue;
        const auto kk = static_cast<Eigen::Index>(k);
        // coupling(j) = sum_{m in C_k} conj(g_hat_mk) g_mj
        coupling.setZero();
        double est_energy = 0.0;
        for (int m : clusters[k]) {
            const std::complex<double> w = std::conj(ch.g_hat(m, kk));
            coupling += w * ch.g.row(m).transpose();
            est_energy += std::norm(ch.g_hat(m, kk));
        }
        double interference = 0.0;
        for (std::size_t j = 0; j < k_users; ++j)
            if (j != k)
                interference += powers_w[j] * std::norm(coupling(static_cast<Eigen::Index>(j)));
        sinr[k] = powers_w[k] * std::norm(coupling(kk)) / (interference + noise_power_w * est_energy);
    }
    return sinr;
}

double achievable_rate(double sinr, double bandwidth_hz, double prelog)
{
    return prelog * bandwidth_hz * std::log2(1.0 + sinr);
}

NetworkScenario make_architecture(const NetworkScenario& scenario, Architecture mode,
                                  const PathLossConstants& c)
{
    NetworkScenario out = scenario;
    switch (mode) {
    case Architecture::cell_free:
        break;
    case Architecture::small_cell:
        out.clusters = form_clusters(scenario.beta, 1);
        break;
    case Architecture::colocated: {
        const std::size_t antennas = scenario.clusters.empty() ? 1 : scenario.clusters.front().size();
        const Point center{scenario.area_side_km / 2.0, scenario.area_side_km / 2.0};
        Rng rng = make_rng(scenario.seed, Stream::colocated_shadowing);
        std::normal_distribution<double> normal(0.0, 1.0);
        out.ap_positions.assign(antennas, center);
        out.beta.resize(static_cast<Eigen::Index>(antennas),
                        static_cast<Eigen::Index>(scenario.num_users()));
        for (std::size_t k = 0; k < scenario.num_users(); ++k) {
            const double d = std::max(distance_km(scenario.user_positions[k], center), 1e-9);
            const double z = normal(rng);
            out.beta.col(static_cast<Eigen::Index>(k))
                .setConstant(large_scale_gain(path_loss_db(d, c), z, c.shadow_std_db, d > c.d1_km));
        }
        std::vector<int> all(antennas);
        std::iota(all.begin(), all.end(), 0);
        out.clusters.assign(scenario.num_users(), all);
        break;
    }
    }
    return out;
}

}  // namespace cfmec::phy
