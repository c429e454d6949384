#include "cfmec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace cfmec {

void EpisodeAccumulator::add(const compute::StepOutcome& outcome)
{
    reward_ += outcome.reward;
    for (const auto& u : outcome.users) {
        ++opportunities_;
        if (u.deadline_met)
            ++met_;
        energy_ += u.e_total_j;
        if (std::isfinite(u.t_total_s)) {
            latency_ += u.t_total_s;
            ++finite_latency_;
        }
    }
}

EpisodeMetrics EpisodeAccumulator::finish(int episode) const
{
    EpisodeMetrics m;
    m.episode = episode;
    m.reward = reward_;
    if (opportunities_ > 0) {
        m.success_rate = static_cast<double>(met_) / static_cast<double>(opportunities_);
        m.mean_energy_j = energy_ / static_cast<double>(opportunities_);
    }
    if (finite_latency_ > 0)
        m.mean_latency_s = latency_ / static_cast<double>(finite_latency_);
    return m;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window)
{
    window = std::max<std::size_t>(window, 1);
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= window)
            sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

MetricsSummary summarize_tail(std::span<const EpisodeMetrics> series, std::size_t count)
{
    MetricsSummary s;
    const std::size_t n = std::min(count, series.size());
    if (n == 0)
        return s;
    for (const auto& m : series.last(n)) {
        s.reward += m.reward;
        s.success_rate += m.success_rate;
        s.mean_energy_j += m.mean_energy_j;
    }
    s.reward /= static_cast<double>(n);
    s.success_rate /= static_cast<double>(n);
    s.mean_energy_j /= static_cast<double>(n);
    return s;
}

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string to_csv_row(const EpisodeMetrics& m)
{
    return std::to_string(m.episode) + ',' + format_double(m.reward) + ',' +
           format_double(m.success_rate) + ',' + format_double(m.mean_energy_j) + ',' +
           format_double(m.mean_latency_s);
}

}  // namespace cfmec
