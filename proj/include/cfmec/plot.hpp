#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cfmec::plot {

struct Series {
    std::string label;
    std::vector<double> episode;
    std::vector<double> reward;
    std::vector<double> success_rate;
};

/// Reads a per-run metrics CSV (one series) or a comparison table (one series
/// per algorithm/architecture pair, in order of first appearance).
std::vector<Series> read_series(const std::filesystem::path& csv);

/// Two stacked panels, reward and success rate, each smoothed with a trailing
/// moving average of `window` episodes.
std::string render_svg(const std::vector<Series>& series, std::size_t window);

inline constexpr std::size_t kDefaultWindow = 50;

void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg,
              std::size_t window = kDefaultWindow);

}  // namespace cfmec::plot
