#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfmec/compute.hpp"

namespace cfmec {

struct EpisodeMetrics {
    int episode = 0;
    /// Sum of the per-step cooperative rewards.
    double reward = 0.0;
    /// Fraction of (user, step) pairs that met their deadline.
    double success_rate = 0.0;
    double mean_energy_j = 0.0;
    /// Mean over user-steps with a finite latency.
    double mean_latency_s = 0.0;
};

/// The single scoring path shared by every algorithm.
class EpisodeAccumulator {
public:
    void add(const compute::StepOutcome& outcome);
    EpisodeMetrics finish(int episode) const;
    std::size_t opportunities() const { return opportunities_; }

private:
    double reward_ = 0.0;
    std::size_t opportunities_ = 0;
    std::size_t met_ = 0;
    double energy_ = 0.0;
    double latency_ = 0.0;
    std::size_t finite_latency_ = 0;
};

/// Trailing moving average with the given window (shorter at the start).
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

struct MetricsSummary {
    double reward = 0.0;
    double success_rate = 0.0;
    double mean_energy_j = 0.0;
};

/// Mean of the last `count` episodes (all of them if fewer).
MetricsSummary summarize_tail(std::span<const EpisodeMetrics> series, std::size_t count);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

inline constexpr const char* kMetricsHeader =
    "episode,reward,success_rate,mean_energy_j,mean_latency_s";

std::string to_csv_row(const EpisodeMetrics& m);

}  // namespace cfmec
