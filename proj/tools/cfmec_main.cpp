#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfmec/experiment.hpp"
#include "cfmec/plot.hpp"

namespace fs = std::filesystem;
using namespace cfmec;

namespace {

struct CommonOptions {
    std::string preset = "full";
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::optional<std::string> algo;
    std::optional<std::string> arch;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool single_algo)
{
    cmd->add_option("--preset", o.preset, "Base defaults: full (100 APs, 10 users) or desk (40 APs, 5 users)")
        ->check(CLI::IsMember({"full", "desk"}));
    cmd->add_option("--config", o.config, "Flat key = value config file");
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--episodes", o.episodes, "Number of episodes");
    if (single_algo) {
        cmd->add_option("--algo", o.algo, "maddpg, ddpg_central, offload_first or local_first");
        cmd->add_option("--arch", o.arch, "cell_free, small_cell or colocated");
    }
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--set", o.overrides, "Extra key=value override, repeatable");
}

harness::ExperimentConfig resolve(const CommonOptions& o)
{
    auto cfg = o.preset == "desk" ? harness::desk_scale_config() : harness::ExperimentConfig{};
    if (!o.config.empty())
        cfg = harness::load_config(o.config, cfg);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        harness::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.episodes)
        cfg.episodes = *o.episodes;
    if (o.algo)
        harness::apply_setting(cfg, "algorithm", *o.algo);
    if (o.arch)
        harness::apply_setting(cfg, "architecture", *o.arch);
    if (o.out)
        cfg.out_dir = *o.out;
    cfg.validate();
    return cfg;
}

void print_summary(const char* label, const std::vector<EpisodeMetrics>& series)
{
    if (series.empty())
        return;
    const auto s = summarize_tail(series, 100);
    std::cout << label << ": reward " << s.reward << ", success rate " << s.success_rate
              << ", energy per user-step " << s.mean_energy_j << " J (last "
              << std::min<std::size_t>(series.size(), 100) << " episodes)\n";
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        out.push_back(s.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::vector<fs::path> run_checkpoints(const fs::path& dir)
{
    std::vector<fs::path> out;
    for (std::size_t k = 0;; ++k) {
        const auto p = dir / ("actor_" + std::to_string(k) + ".ckpt");
        if (!fs::exists(p))
            break;
        out.push_back(p);
    }
    if (out.empty())
        throw std::runtime_error("no actor checkpoints in " + dir.string());
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cell-free MEC simulator with multi-agent DDPG resource allocation"};
    app.require_subcommand(1);

    CommonOptions train_opts, eval_opts, compare_opts;
    auto* train = app.add_subcommand("train", "Train or run one algorithm and write metrics");
    add_common(train, train_opts, true);
    train->add_option_function<int>(
        "--eval-episodes", [&](int n) { train_opts.overrides.push_back("eval_episodes=" + std::to_string(n)); },
        "Exploration-free evaluation episodes after training");

    auto* eval = app.add_subcommand("eval", "Evaluate saved actors or a heuristic without exploration");
    add_common(eval, eval_opts, true);
    std::string run_dir;
    std::vector<std::string> checkpoint_files;
    eval->add_option("--run", run_dir, "Training output directory holding manifest and checkpoints");
    eval->add_option("--checkpoint", checkpoint_files, "Actor checkpoint, repeatable, in user order");

    auto* compare = app.add_subcommand("compare", "Run every algorithm on every architecture");
    add_common(compare, compare_opts, false);
    std::string algos = "maddpg,offload_first,local_first";
    std::string archs = "cell_free,small_cell,colocated";
    compare->add_option("--algo", algos, "Comma-separated algorithms");
    compare->add_option("--arch", archs, "Comma-separated architectures");

    auto* plot = app.add_subcommand("plot", "Render a metrics or comparison CSV to SVG");
    std::string plot_in, plot_out;
    std::size_t window = plot::kDefaultWindow;
    plot->add_option("--input", plot_in, "CSV to read")->required();
    plot->add_option("--out", plot_out, "SVG to write (default: input with .svg)");
    plot->add_option("--window", window, "Moving-average window in episodes")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const auto cfg = resolve(train_opts);
            std::cout << "running " << harness::to_string(cfg.algorithm) << " on "
                      << phy::to_string(cfg.architecture) << ", seed " << cfg.seed << ", "
                      << cfg.episodes << " episodes -> " << cfg.out_dir.string() << "\n";
            const auto result = harness::run_experiment(cfg, [](const EpisodeMetrics& m) {
                if ((m.episode + 1) % 50 == 0)
                    std::cout << "episode " << m.episode + 1 << ": reward " << m.reward
                              << ", success rate " << m.success_rate << std::endl;
            });
            print_summary(harness::is_learned(cfg.algorithm) ? "training" : "evaluation",
                          result.metrics);
            print_summary("evaluation", result.evaluation);
        } else if (*eval) {
            CommonOptions o = eval_opts;
            std::vector<fs::path> checkpoints(checkpoint_files.begin(), checkpoint_files.end());
            if (!run_dir.empty()) {
                if (o.config.empty())
                    o.config = (fs::path(run_dir) / harness::kManifestFile).string();
                if (checkpoints.empty())
                    checkpoints = run_checkpoints(run_dir);
            }
            auto cfg = resolve(o);
            const int episodes = o.episodes ? *o.episodes : cfg.eval_episodes;
            std::vector<EpisodeMetrics> series;
            if (!checkpoints.empty()) {
                series = harness::evaluate_policy(checkpoints, cfg, episodes);
            } else if (!harness::is_learned(cfg.algorithm)) {
                env::Environment env(cfg.system, harness::build_scenario(cfg));
                const auto scenario = env.scenario();
                series = harness::run_policy(
                    env, harness::heuristic_policy(cfg.algorithm, cfg.system, cfg.fpc, scenario),
                    episodes, cfg.seed);
            } else {
                throw std::invalid_argument("eval of a learned algorithm needs --run or --checkpoint");
            }
            if (o.out) {
                fs::create_directories(*o.out);
                harness::MetricsWriter w(fs::path(*o.out) / harness::kEvalFile, kMetricsHeader);
                for (const auto& m : series)
                    w.write(to_csv_row(m));
            }
            print_summary("evaluation", series);
        } else if (*compare) {
            const auto cfg = resolve(compare_opts);
            std::vector<harness::Algorithm> a;
            for (const auto& s : split_list(algos)) {
                const auto v = harness::parse_algorithm(s);
                if (!v)
                    throw std::invalid_argument("unknown algorithm '" + s + "'");
                a.push_back(*v);
            }
            std::vector<phy::Architecture> r;
            for (const auto& s : split_list(archs)) {
                const auto v = phy::parse_architecture(s);
                if (!v)
                    throw std::invalid_argument("unknown architecture '" + s + "'");
                r.push_back(*v);
            }
            const auto table = harness::compare_architectures(cfg, a, r);
            std::cout << "wrote " << table.string() << "\n";
        } else if (*plot) {
            const fs::path out = plot_out.empty() ? fs::path(plot_in).replace_extension(".svg") : fs::path(plot_out);
            plot::plot_csv(plot_in, out, window);
            std::cout << "wrote " << out.string() << "\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
