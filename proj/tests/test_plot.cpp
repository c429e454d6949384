#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfmec/plot.hpp"

using namespace cfmec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name, const std::string& content)
{
    const auto dir = fs::temp_directory_path() / "cfmec_test_plot";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << content;
    return p;
}

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("metrics csv gives one series")
{
    const auto p = scratch("metrics.csv",
                           "episode,reward,success_rate,mean_energy_j,mean_latency_s\n"
                           "0,-10,0.5,1e-5,1e-4\n1,-8,0.75,1e-5,1e-4\n2,-6,1,1e-5,1e-4\n");
    const auto s = plot::read_series(p);
    REQUIRE(s.size() == 1);
    CHECK(s[0].label == "metrics");
    CHECK(s[0].episode == std::vector<double>{0, 1, 2});
    CHECK(s[0].reward == std::vector<double>{-10, -8, -6});
    CHECK(s[0].success_rate == std::vector<double>{0.5, 0.75, 1});
}

TEST_CASE("comparison csv gives one series per pair")
{
    const auto p = scratch("comparison.csv",
                           "algorithm,architecture,episode,reward,success_rate,mean_energy_j,mean_latency_s\n"
                           "maddpg,cell_free,0,-3,1,0,0\n"
                           "maddpg,cell_free,1,-2,1,0,0\n"
                           "local_first,colocated,0,-9,1,0,0\n"
                           "local_first,colocated,1,-9,0.5,0,0\n");
    const auto s = plot::read_series(p);
    REQUIRE(s.size() == 2);
    CHECK(s[0].label == "maddpg / cell_free");
    CHECK(s[1].label == "local_first / colocated");
    CHECK(s[1].success_rate == std::vector<double>{1, 0.5});

    const auto svg = plot::render_svg(s, 2);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "<polyline") == 4);
    CHECK(svg.find("maddpg / cell_free") != std::string::npos);
}

TEST_CASE("plot errors")
{
    CHECK_THROWS_AS(plot::read_series("/nonexistent/metrics.csv"), std::runtime_error);
    CHECK_THROWS_AS(plot::read_series(scratch("empty.csv", "")), std::runtime_error);
    CHECK_THROWS_AS(plot::read_series(scratch("nocol.csv", "episode,reward\n0,1\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(plot::read_series(scratch("short.csv", "episode,reward,success_rate\n0,1\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(plot::read_series(scratch("nan.csv", "episode,reward,success_rate\n0,x,1\n")),
                    std::runtime_error);

    const auto in = scratch("ok.csv", "episode,reward,success_rate\n0,-1,1\n");
    const auto out = in.parent_path() / "ok.svg";
    CHECK_THROWS_AS(plot::plot_csv(in, out, 0), std::invalid_argument);
    plot::plot_csv(in, out);
    CHECK(fs::file_size(out) > 0);
    // A single point still renders.
    std::ifstream is(out);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(count(ss.str(), "<polyline") == 2);
}
