#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfmec/checkpoint.hpp"
#include "cfmec/experiment.hpp"

using namespace cfmec;
using namespace cfmec::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "cfmec_test_experiment" / name;
    fs::remove_all(dir);
    return dir;
}

std::string read_all(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p)
{
    std::ifstream is(p);
    std::size_t n = 0;
    for (std::string line; std::getline(is, line);)
        ++n;
    return n;
}

// Small and quick: 8 APs, 2 users, short episodes, small nets.
ExperimentConfig quick(const std::string& name)
{
    ExperimentConfig cfg;
    cfg.system.geometry.num_aps = 8;
    cfg.system.geometry.num_users = 2;
    cfg.system.env.horizon = 20;
    cfg.hp.hidden = {8};
    cfg.hp.batch_size = 8;
    cfg.hp.replay_capacity = 200;
    cfg.hp.warmup = 30;
    cfg.episodes = 4;
    cfg.eval_episodes = 3;
    cfg.out_dir = scratch_dir(name);
    return cfg;
}

ExperimentConfig parse(const std::string& text, ExperimentConfig base = {})
{
    std::istringstream is(text);
    return parse_config(is, "test.cfg", base);
}

}  // namespace

TEST_CASE("algorithm names")
{
    for (auto a : {Algorithm::maddpg, Algorithm::ddpg_central, Algorithm::offload_first,
                   Algorithm::local_first})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_FALSE(parse_algorithm("ppo"));
    CHECK(is_learned(Algorithm::maddpg));
    CHECK(is_learned(Algorithm::ddpg_central));
    CHECK_FALSE(is_learned(Algorithm::local_first));
}

TEST_CASE("defaults")
{
    const ExperimentConfig full;
    CHECK(full.system.geometry.num_aps == 100);
    CHECK(full.system.geometry.num_users == 10);
    CHECK(full.hp.lr_actor == 1e-4);
    CHECK(full.hp.lr_critic == 1e-3);
    CHECK(full.hp.batch_size == 128);
    CHECK_NOTHROW(full.validate());

    const auto desk = desk_scale_config();
    CHECK(desk.system.geometry.num_aps == 40);
    CHECK(desk.system.geometry.num_users == 5);
    CHECK(desk.system.geometry.cluster_fraction == 0.3);
    CHECK(desk.system.radio.bandwidth_hz == 5e6);
    CHECK(desk.episodes == 800);
}

TEST_CASE("config parsing")
{
    const auto cfg = parse("# comment\n"
                           "algorithm = ddpg_central\n"
                           "architecture=small_cell\n"
                           "\n"
                           "  num_aps = 40   # trailing\n"
                           "user_deadlines_s = 0.001, 0.002\n"
                           "num_users = 2\n"
                           "hidden = 32,16\n"
                           "noise_power_w = 1e-13\n"
                           "noise_boundary = clip\n"
                           "seed = 42\n");
    CHECK(cfg.algorithm == Algorithm::ddpg_central);
    CHECK(cfg.architecture == phy::Architecture::small_cell);
    CHECK(cfg.system.geometry.num_aps == 40);
    CHECK(cfg.hp.hidden == std::vector<int>{32, 16});
    CHECK(cfg.system.radio.noise_power_override_w == 1e-13);
    CHECK(cfg.hp.noise.boundary == rl::NoiseBoundary::clip);
    CHECK(cfg.seed == 42);
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("later layers override the base")
    {
        const auto desk = parse("episodes = 10\n", desk_scale_config());
        CHECK(desk.system.geometry.num_aps == 40);
        CHECK(desk.episodes == 10);
    }
    SUBCASE("round trip through text")
    {
        const auto again = parse(to_config_text(cfg));
        CHECK(to_config_text(again) == to_config_text(cfg));
        const auto auto_noise = parse("noise_power_w = auto\n", cfg);
        CHECK_FALSE(auto_noise.system.radio.noise_power_override_w);
        CHECK(to_config_text(parse(to_config_text(auto_noise))) == to_config_text(auto_noise));
    }
    SUBCASE("every key is written")
    {
        const auto text = to_config_text(cfg);
        for (const auto& key : config_keys())
            CHECK(text.find(key + " = ") != std::string::npos);
    }
}

TEST_CASE("config errors name the line")
{
    auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("num_aps = 40\nbogus = 1\n").find("test.cfg:2:") == 0);
    CHECK(message("bogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
    CHECK(message("num_aps 40\n").find("test.cfg:1:") == 0);
    CHECK(message("num_aps = forty\n").find("num_aps") != std::string::npos);
    CHECK(message("num_aps = 4.5\n") != "no error");
    CHECK(message("algorithm = ppo\n").find("algorithm") != std::string::npos);
    CHECK(message("apply_prelog = maybe\n") != "no error");
    CHECK(message("noise_boundary = wrap\n") != "no error");
    CHECK_THROWS_AS(load_config("/nonexistent/cfmec.cfg"), std::exception);

    ExperimentConfig cfg;
    cfg.system.geometry.cluster_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("architectures share one drop")
{
    auto cfg = quick("drops");
    cfg.system.geometry.num_aps = 16;
    const auto cf = build_scenario(cfg);
    cfg.architecture = phy::Architecture::small_cell;
    const auto sc = build_scenario(cfg);
    cfg.architecture = phy::Architecture::colocated;
    const auto co = build_scenario(cfg);
    for (std::size_t k = 0; k < cf.num_users(); ++k) {
        CHECK(sc.user_positions[k].x_km == cf.user_positions[k].x_km);
        CHECK(co.user_positions[k].y_km == cf.user_positions[k].y_km);
        CHECK(sc.clusters[k].size() == 1);
    }
}

TEST_CASE("heuristic run")
{
    auto cfg = quick("heuristic");
    cfg.algorithm = Algorithm::local_first;
    cfg.episodes = 10;
    int seen = 0;
    const auto r = run_experiment(cfg, [&](const EpisodeMetrics&) { ++seen; });
    CHECK(seen == 10);
    CHECK(r.metrics.size() == 10);
    CHECK(r.evaluation.empty());
    CHECK(r.checkpoints.empty());
    CHECK(line_count(cfg.out_dir / kMetricsFile) == 11);
    CHECK_FALSE(fs::exists(cfg.out_dir / kEvalFile));
    // The manifest reloads to the same configuration.
    CHECK(to_config_text(load_config(cfg.out_dir / kManifestFile)) == to_config_text(cfg));
    for (const auto& m : r.metrics) {
        CHECK(m.success_rate >= 0.0);
        CHECK(m.success_rate <= 1.0);
        CHECK(m.reward <= 0.0);
    }
}

TEST_CASE("learned run writes checkpoints and evaluation")
{
    auto cfg = quick("maddpg");
    const auto r = run_experiment(cfg);
    CHECK(r.metrics.size() == 4);
    CHECK(r.evaluation.size() == 3);
    REQUIRE(r.checkpoints.size() == 2);
    CHECK(line_count(cfg.out_dir / kEvalFile) == 4);
    for (const auto& p : r.checkpoints)
        CHECK(rl::load_checkpoint(p).params.sizes() == std::vector<int>{3, 8, 2});

    // Reloading the checkpoints reproduces the evaluation.
    const auto again = evaluate_policy(r.checkpoints, cfg, 3);
    REQUIRE(again.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(to_csv_row(again[i]) == to_csv_row(r.evaluation[i]));

    SUBCASE("rerun is byte identical")
    {
        const auto metrics = read_all(cfg.out_dir / kMetricsFile);
        const auto eval = read_all(cfg.out_dir / kEvalFile);
        const auto ckpt = read_all(r.checkpoints[1]);
        run_experiment(cfg);
        CHECK(read_all(cfg.out_dir / kMetricsFile) == metrics);
        CHECK(read_all(cfg.out_dir / kEvalFile) == eval);
        CHECK(read_all(r.checkpoints[1]) == ckpt);
    }
    SUBCASE("checkpoints must match the user count")
    {
        auto three = cfg;
        three.system.geometry.num_users = 3;
        CHECK_THROWS_AS(evaluate_policy(r.checkpoints, three, 1), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_policy({r.checkpoints[0]}, cfg, 1), std::invalid_argument);
    }
}

TEST_CASE("centralized run writes one full-state actor")
{
    auto cfg = quick("ddpg");
    cfg.algorithm = Algorithm::ddpg_central;
    const auto r = run_experiment(cfg);
    REQUIRE(r.checkpoints.size() == 1);
    CHECK(rl::load_checkpoint(r.checkpoints[0]).params.sizes() == std::vector<int>{6, 8, 4});
    CHECK(r.evaluation.size() == 3);
}

TEST_CASE("untrained actors evaluate to valid metrics")
{
    auto cfg = quick("untrained");
    Rng rng(1);
    std::vector<rl::MlpParams<float>> actors;
    for (int k = 0; k < 2; ++k)
        actors.push_back(rl::make_mlp<float>(std::vector<int>{3, 8, 2}, rl::OutputActivation::sigmoid, rng));
    env::Environment env(cfg.system, build_scenario(cfg));
    const auto series = run_policy(env, actor_policy(actors, 2), 2, cfg.seed);
    for (const auto& m : series) {
        CHECK(m.success_rate >= 0.0);
        CHECK(m.success_rate <= 1.0);
        CHECK(m.reward <= 0.0);
        CHECK(m.mean_energy_j >= 0.0);
    }
    CHECK_THROWS_AS(actor_policy(actors, 3), std::invalid_argument);
    CHECK_THROWS_AS(heuristic_policy(Algorithm::maddpg, cfg.system, cfg.fpc, build_scenario(cfg)),
                    std::invalid_argument);
}

TEST_CASE("architecture comparison table")
{
    auto cfg = quick("compare");
    cfg.episodes = 3;
    cfg.eval_episodes = 0;
    const std::vector<Algorithm> algorithms{Algorithm::maddpg, Algorithm::offload_first};
    const std::vector<phy::Architecture> archs{phy::Architecture::cell_free,
                                               phy::Architecture::small_cell,
                                               phy::Architecture::colocated};
    const auto table = compare_architectures(cfg, algorithms, archs);
    CHECK(line_count(table) == 1 + 2 * 3 * 3);
    CHECK(read_all(table).rfind(kComparisonHeader, 0) == 0);
    CHECK(fs::exists(cfg.out_dir / "maddpg_small_cell" / kMetricsFile));
    CHECK(fs::exists(cfg.out_dir / "offload_first_colocated" / kMetricsFile));
    CHECK_THROWS_AS(compare_architectures(cfg, {}, archs), std::invalid_argument);
}

TEST_CASE("metrics writer")
{
    const auto dir = scratch_dir("writer");
    fs::create_directories(dir);
    {
        MetricsWriter w(dir / "x.csv", "a,b");
        w.write("1,2");
        // Rows are on disk before the writer goes away.
        CHECK(read_all(dir / "x.csv") == "a,b\n1,2\n");
    }
    CHECK_THROWS_AS(MetricsWriter(dir / "missing" / "x.csv", "a"), std::runtime_error);
}
