#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cfmec/rng.hpp"

namespace cfmec {

struct SystemConfig;

namespace phy {

struct Point {
    double x_km = 0.0;
    double y_km = 0.0;
};

double distance_km(const Point& a, const Point& b);

/// Constants of the three-slope path-loss model with a Hata-style
/// intercept. Frequency in MHz, heights in metres, breakpoints in km.
struct PathLossConstants {
    double carrier_freq_mhz = 1900.0;
    double ap_height_m = 15.0;
    double user_height_m = 1.65;
    double d0_km = 0.01;
    double d1_km = 0.05;
    double shadow_std_db = 10.0;

    void validate() const;
};

struct RadioConfig {
    double bandwidth_hz = 5e6;
    double noise_figure_db = 9.0;
    /// When unset the noise power is -174 dBm/Hz over the bandwidth plus the noise figure.
    std::optional<double> noise_power_override_w;
    double pilot_power_w = 0.1;
    /// Pilot length in samples; 0 means "one orthogonal pilot per user".
    int pilot_len = 0;
    double max_ul_power_w = 0.1;
    double coherence_ms = 1.0;
    /// Multiply rates by (tau_c - tau_p) / tau_c. Off by default.
    bool apply_prelog = false;
    int coherence_samples = 200;

    double noise_power_w() const;
    int pilot_length(std::size_t num_users) const;
    double prelog(std::size_t num_users) const;
    void validate(std::size_t num_users) const;
};

double thermal_noise_power_w(double bandwidth_hz, double noise_figure_db);

enum class Architecture { cell_free, small_cell, colocated };

std::string_view to_string(Architecture a);
std::optional<Architecture> parse_architecture(std::string_view s);

/// One drop of the network: geometry, large-scale gains (M x K) and the
/// serving cluster of each user, ordered by decreasing gain.
struct NetworkScenario {
    std::vector<Point> ap_positions;
    std::vector<Point> user_positions;
    Eigen::MatrixXd beta;
    std::vector<std::vector<int>> clusters;
    double area_side_km = 1.0;
    std::uint64_t seed = 0;

    std::size_t num_aps() const { return ap_positions.size(); }
    std::size_t num_users() const { return user_positions.size(); }
};

/// Small-scale fades h, true channels g and LS estimates g_hat, all M x K.
struct ChannelRealization {
    Eigen::MatrixXcd h;
    Eigen::MatrixXcd g;
    Eigen::MatrixXcd g_hat;
};

/// Distance-independent intercept L (dB) of the three-slope model.
double hata_intercept_db(const PathLossConstants& c);

/// Three-slope path loss in dB (a negative number). Requires d_km > 0.
double path_loss_db(double d_km, const PathLossConstants& c);

double large_scale_gain(double pl_db, double z, double shadow_std_db, bool apply_shadowing);

/// The `size` largest entries of each column of beta, lowest index first on ties.
std::vector<std::vector<int>> form_clusters(const Eigen::MatrixXd& beta, std::size_t size);

NetworkScenario generate_scenario(const SystemConfig& config, std::uint64_t seed);

ChannelRealization draw_channels(const NetworkScenario& scenario, const RadioConfig& radio,
                                 Rng& rng);

/// MRC uplink SINR of every user over its own cluster.
std::vector<double> uplink_sinr(std::span<const double> powers_w, const ChannelRealization& ch,
                                const std::vector<std::vector<int>>& clusters,
                                double noise_power_w);

double achievable_rate(double sinr, double bandwidth_hz, double prelog = 1.0);

/// Re-serve the users of a cell-free drop with a cellular topology.
NetworkScenario make_architecture(const NetworkScenario& scenario, Architecture mode,
                                  const PathLossConstants& c);

}  // namespace phy
}  // namespace cfmec
