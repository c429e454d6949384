#include "cfmec/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfmec/metrics.hpp"

namespace cfmec::plot {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
        out.push_back(cell);
    return out;
}

double to_double(const std::string& s, const std::filesystem::path& path, int lineno)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": not a number: '" + s + "'");
    return v;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name,
                   const std::filesystem::path& path)
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw std::runtime_error(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Panel {
    double top;
    double height;
    std::string title;
};

}  // namespace

std::vector<Series> read_series(const std::filesystem::path& csv)
{
    std::ifstream is(csv);
    if (!is)
        throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(csv.string() + ": empty file");
    const auto header = split(line);
    const auto c_ep = column(header, "episode", csv);
    const auto c_reward = column(header, "reward", csv);
    const auto c_success = column(header, "success_rate", csv);
    const bool keyed = std::find(header.begin(), header.end(), "algorithm") != header.end();
    const std::size_t c_algo = keyed ? column(header, "algorithm", csv) : 0;
    const std::size_t c_arch = keyed ? column(header, "architecture", csv) : 0;

    std::vector<Series> out;
    if (!keyed)
        out.push_back({csv.stem().string(), {}, {}, {}});
    for (int lineno = 2; std::getline(is, line); ++lineno) {
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) + " columns");
        Series* s = &out.front();
        if (keyed) {
            const std::string label = cells[c_algo] + " / " + cells[c_arch];
            auto it = std::find_if(out.begin(), out.end(),
                                   [&](const Series& x) { return x.label == label; });
            if (it == out.end()) {
                out.push_back({label, {}, {}, {}});
                it = out.end() - 1;
            }
            s = &*it;
        }
        s->episode.push_back(to_double(cells[c_ep], csv, lineno));
        s->reward.push_back(to_double(cells[c_reward], csv, lineno));
        s->success_rate.push_back(to_double(cells[c_success], csv, lineno));
    }
    return out;
}

std::string render_svg(const std::vector<Series>& series, std::size_t window)
{
    const double width = 800, left = 70, right = 20, plot_w = width - left - right;
    const Panel panels[] = {{30, 220, "Average reward"}, {320, 220, "Success rate"}};
    const double height = 600 + 24.0 * static_cast<double>(series.size());

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double r_min = x_min, r_max = -x_min;
    std::vector<std::vector<double>> rewards, successes;
    for (const auto& s : series) {
        rewards.push_back(moving_average(s.reward, window));
        successes.push_back(moving_average(s.success_rate, window));
        for (double e : s.episode) {
            x_min = std::min(x_min, e);
            x_max = std::max(x_max, e);
        }
        for (double r : rewards.back()) {
            r_min = std::min(r_min, r);
            r_max = std::max(r_max, r);
        }
    }
    if (!std::isfinite(x_min)) {
        x_min = 0;
        x_max = 1;
        r_min = -1;
        r_max = 0;
    }
    if (x_max == x_min)
        x_max = x_min + 1;
    if (r_max == r_min) {
        r_min -= 1;
        r_max += 1;
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    auto x_at = [&](double e) { return left + (e - x_min) / (x_max - x_min) * plot_w; };
    for (int p = 0; p < 2; ++p) {
        const auto& panel = panels[p];
        const double lo = p == 0 ? r_min : 0.0, hi = p == 0 ? r_max : 1.0;
        auto y_at = [&](double v) { return panel.top + panel.height - (v - lo) / (hi - lo) * panel.height; };
        svg << "<text x=\"" << left << "\" y=\"" << panel.top - 8 << "\">" << panel.title
            << " (moving average, " << window << " episodes)</text>\n";
        svg << "<rect x=\"" << left << "\" y=\"" << panel.top << "\" width=\"" << plot_w
            << "\" height=\"" << panel.height << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double v = lo + (hi - lo) * t / 4.0;
            svg << "<text x=\"" << left - 6 << "\" y=\"" << y_at(v) + 4
                << "\" text-anchor=\"end\">" << format_double(std::round(v * 1000) / 1000)
                << "</text>\n";
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& ys = p == 0 ? rewards[i] : successes[i];
            if (ys.empty())
                continue;
            svg << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\""
                << kColors[i % std::size(kColors)] << "\" points=\"";
            for (std::size_t j = 0; j < ys.size(); ++j)
                svg << (j ? " " : "") << x_at(series[i].episode[j]) << ',' << y_at(ys[j]);
            svg << "\"/>\n";
        }
    }
    const double axis_y = panels[1].top + panels[1].height;
    svg << "<text x=\"" << left << "\" y=\"" << axis_y + 16 << "\">" << format_double(x_min)
        << "</text>\n";
    svg << "<text x=\"" << left + plot_w << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"end\">"
        << format_double(x_max) << "</text>\n";
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << axis_y + 16
        << "\" text-anchor=\"middle\">episode</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = axis_y + 40 + 24.0 * static_cast<double>(i);
        svg << "<rect x=\"" << left << "\" y=\"" << y - 10 << "\" width=\"14\" height=\"4\" fill=\""
            << kColors[i % std::size(kColors)] << "\"/>\n";
        svg << "<text x=\"" << left + 20 << "\" y=\"" << y - 4 << "\">" << series[i].label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg,
              std::size_t window)
{
    if (window == 0)
        throw std::invalid_argument("moving-average window must be positive");
    const auto text = render_svg(read_series(csv), window);
    std::ofstream os(svg, std::ios::out | std::ios::trunc);
    os << text;
    if (!os.flush())
        throw std::runtime_error("write to " + svg.string() + " failed");
}

}  // namespace cfmec::plot
