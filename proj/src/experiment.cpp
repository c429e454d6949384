#include "cfmec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "cfmec/trainer.hpp"

namespace cfmec::harness {

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::maddpg: return "maddpg";
    case Algorithm::ddpg_central: return "ddpg_central";
    case Algorithm::offload_first: return "offload_first";
    case Algorithm::local_first: return "local_first";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view s)
{
    for (auto a : {Algorithm::maddpg, Algorithm::ddpg_central, Algorithm::offload_first,
                   Algorithm::local_first})
        if (s == to_string(a))
            return a;
    return std::nullopt;
}

bool is_learned(Algorithm a)
{
    return a == Algorithm::maddpg || a == Algorithm::ddpg_central;
}

void ExperimentConfig::validate() const
{
    system.validate();
    hp.validate();
    fpc.validate();
    if (episodes < 1)
        throw std::invalid_argument("episodes must be at least 1");
    if (eval_episodes < 0)
        throw std::invalid_argument("eval_episodes must be non-negative");
    if (out_dir.empty())
        throw std::invalid_argument("out_dir must not be empty");
}

ExperimentConfig desk_scale_config()
{
    ExperimentConfig cfg;
    cfg.system.geometry.num_aps = 40;
    cfg.system.geometry.num_users = 5;
    cfg.episodes = 800;
    return cfg;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v)
{
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument(std::string(key) + ": cannot parse '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw std::invalid_argument(std::string(key) + ": expected true or false, got '" +
                                std::string(v) + "'");
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view v)
{
    std::vector<T> out;
    if (trim(v).empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        out.push_back(parse_number<T>(key, trim(v.substr(start, comma - start))));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& values)
{
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            s += ',';
        if constexpr (std::is_floating_point_v<T>)
            s += format_double(values[i]);
        else
            s += std::to_string(values[i]);
    }
    return s;
}

struct Setting {
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, std::string_view)> set;
};

template <class Field>
Setting real(const char* key, Field field)
{
    return {key, [field](const ExperimentConfig& c) { return format_double(field(c)); },
            [field, key](ExperimentConfig& c, std::string_view v) {
                field(c) = parse_number<double>(key, v);
            }};
}

template <class Field>
Setting integer(const char* key, Field field)
{
    return {key, [field](const ExperimentConfig& c) { return std::to_string(field(c)); },
            [field, key](ExperimentConfig& c, std::string_view v) {
                using V = std::remove_reference_t<decltype(field(c))>;
                field(c) = parse_number<V>(key, v);
            }};
}

template <class Field>
Setting boolean(const char* key, Field field)
{
    return {key, [field](const ExperimentConfig& c) { return field(c) ? "true" : "false"; },
            [field, key](ExperimentConfig& c, std::string_view v) { field(c) = parse_bool(key, v); }};
}

#define CFMEC_FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Setting>& settings()
{
    static const std::vector<Setting> table = {
        {"algorithm", [](const ExperimentConfig& c) { return std::string(to_string(c.algorithm)); },
         [](ExperimentConfig& c, std::string_view v) {
             const auto a = parse_algorithm(v);
             if (!a)
                 throw std::invalid_argument(
                     "algorithm: expected maddpg, ddpg_central, offload_first or local_first, got '" +
                     std::string(v) + "'");
             c.algorithm = *a;
         }},
        {"architecture",
         [](const ExperimentConfig& c) { return std::string(phy::to_string(c.architecture)); },
         [](ExperimentConfig& c, std::string_view v) {
             const auto a = phy::parse_architecture(v);
             if (!a)
                 throw std::invalid_argument(
                     "architecture: expected cell_free, small_cell or colocated, got '" +
                     std::string(v) + "'");
             c.architecture = *a;
         }},
        integer("episodes", CFMEC_FIELD(episodes)),
        integer("eval_episodes", CFMEC_FIELD(eval_episodes)),
        integer("seed", CFMEC_FIELD(seed)),
        {"out_dir", [](const ExperimentConfig& c) { return c.out_dir.string(); },
         [](ExperimentConfig& c, std::string_view v) { c.out_dir = std::string(v); }},

        integer("num_aps", CFMEC_FIELD(system.geometry.num_aps)),
        integer("num_users", CFMEC_FIELD(system.geometry.num_users)),
        real("area_side_km", CFMEC_FIELD(system.geometry.area_side_km)),
        real("cluster_fraction", CFMEC_FIELD(system.geometry.cluster_fraction)),
        integer("max_cluster_size", CFMEC_FIELD(system.geometry.max_cluster_size)),

        real("carrier_freq_mhz", CFMEC_FIELD(system.path_loss.carrier_freq_mhz)),
        real("ap_height_m", CFMEC_FIELD(system.path_loss.ap_height_m)),
        real("user_height_m", CFMEC_FIELD(system.path_loss.user_height_m)),
        real("d0_km", CFMEC_FIELD(system.path_loss.d0_km)),
        real("d1_km", CFMEC_FIELD(system.path_loss.d1_km)),
        real("shadow_std_db", CFMEC_FIELD(system.path_loss.shadow_std_db)),

        real("bandwidth_hz", CFMEC_FIELD(system.radio.bandwidth_hz)),
        real("noise_figure_db", CFMEC_FIELD(system.radio.noise_figure_db)),
        {"noise_power_w",
         [](const ExperimentConfig& c) {
             const auto& o = c.system.radio.noise_power_override_w;
             return o ? format_double(*o) : std::string("auto");
         },
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "auto")
                 c.system.radio.noise_power_override_w.reset();
             else
                 c.system.radio.noise_power_override_w = parse_number<double>("noise_power_w", v);
         }},
        real("pilot_power_w", CFMEC_FIELD(system.radio.pilot_power_w)),
        integer("pilot_len", CFMEC_FIELD(system.radio.pilot_len)),
        real("max_ul_power_w", CFMEC_FIELD(system.radio.max_ul_power_w)),
        real("coherence_ms", CFMEC_FIELD(system.radio.coherence_ms)),
        boolean("apply_prelog", CFMEC_FIELD(system.radio.apply_prelog)),
        integer("coherence_samples", CFMEC_FIELD(system.radio.coherence_samples)),

        real("cycles_per_bit", CFMEC_FIELD(system.compute.cycles_per_bit)),
        real("kappa", CFMEC_FIELD(system.compute.kappa)),
        real("f_local_max_hz", CFMEC_FIELD(system.compute.f_local_max_hz)),
        real("f_edge_hz", CFMEC_FIELD(system.compute.f_edge_hz)),
        real("deadline_s", CFMEC_FIELD(system.compute.deadline_s)),
        {"user_deadlines_s",
         [](const ExperimentConfig& c) { return join(c.system.compute.user_deadlines_s); },
         [](ExperimentConfig& c, std::string_view v) {
             c.system.compute.user_deadlines_s = parse_list<double>("user_deadlines_s", v);
         }},
        real("task_min_bits", CFMEC_FIELD(system.compute.task_min_bits)),
        real("task_max_bits", CFMEC_FIELD(system.compute.task_max_bits)),
        real("slot_s", CFMEC_FIELD(system.compute.slot_s)),
        boolean("charge_infeasible_slot", CFMEC_FIELD(system.compute.charge_infeasible_slot)),

        integer("horizon", CFMEC_FIELD(system.env.horizon)),
        real("rate_ref_sinr", CFMEC_FIELD(system.env.rate_ref_sinr)),

        real("lr_actor", CFMEC_FIELD(hp.lr_actor)),
        real("lr_critic", CFMEC_FIELD(hp.lr_critic)),
        real("discount", CFMEC_FIELD(hp.discount)),
        real("tau", CFMEC_FIELD(hp.tau)),
        integer("batch_size", CFMEC_FIELD(hp.batch_size)),
        integer("replay_capacity", CFMEC_FIELD(hp.replay_capacity)),
        integer("warmup", CFMEC_FIELD(hp.warmup)),
        {"hidden", [](const ExperimentConfig& c) { return join(c.hp.hidden); },
         [](ExperimentConfig& c, std::string_view v) { c.hp.hidden = parse_list<int>("hidden", v); }},
        real("final_actor_scale", CFMEC_FIELD(hp.final_actor_scale)),
        real("noise_sigma", CFMEC_FIELD(hp.noise.initial_sigma)),
        real("noise_decay", CFMEC_FIELD(hp.noise.decay)),
        real("noise_floor", CFMEC_FIELD(hp.noise.floor_sigma)),
        {"noise_boundary",
         [](const ExperimentConfig& c) { return std::string(rl::to_string(c.hp.noise.boundary)); },
         [](ExperimentConfig& c, std::string_view v) {
             const auto b = rl::parse_noise_boundary(v);
             if (!b)
                 throw std::invalid_argument("noise_boundary: expected clip or reflect, got '" +
                                             std::string(v) + "'");
             c.hp.noise.boundary = *b;
         }},

        real("fpc_p0_w", CFMEC_FIELD(fpc.p0_w)),
        real("fpc_nu", CFMEC_FIELD(fpc.nu)),
    };
    return table;
}

#undef CFMEC_FIELD

}  // namespace

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
    for (const auto& s : settings())
        if (key == s.key) {
            s.set(cfg, trim(value));
            return;
        }
    throw std::invalid_argument("unknown key '" + std::string(key) + "'");
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& s : settings())
        keys.emplace_back(s.key);
    return keys;
}

ExperimentConfig parse_config(std::istream& is, const std::string& source, ExperimentConfig base)
{
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos)
            v = v.substr(0, hash);
        v = trim(v);
        if (v.empty())
            continue;
        const auto eq = v.find('=');
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string_view::npos)
            throw std::invalid_argument(where + "expected 'key = value'");
        try {
            apply_setting(base, trim(v.substr(0, eq)), v.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config " + path.string());
    return parse_config(is, path.string(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& s : settings())
        out += std::string(s.key) + " = " + s.get(cfg) + "\n";
    return out;
}

phy::NetworkScenario build_scenario(const ExperimentConfig& cfg)
{
    const auto drop = phy::generate_scenario(cfg.system, cfg.seed);
    if (cfg.architecture == phy::Architecture::cell_free)
        return drop;
    return phy::make_architecture(drop, cfg.architecture, cfg.system.path_loss);
}

JointPolicy actor_policy(std::vector<rl::MlpParams<float>> actors, std::size_t num_users)
{
    const int obs = static_cast<int>(env::kObsDim);
    const int act = static_cast<int>(env::kActionDim);
    const int users = static_cast<int>(num_users);
    const bool per_user = actors.size() == num_users &&
                          std::all_of(actors.begin(), actors.end(), [&](const auto& a) {
                              return a.input_dim() == obs && a.output_dim() == act;
                          });
    const bool central = actors.size() == 1 && actors[0].input_dim() == obs * users &&
                         actors[0].output_dim() == act * users;
    if (!per_user && !central) {
        std::string shapes;
        for (const auto& a : actors)
            shapes += " " + std::to_string(a.input_dim()) + "->" + std::to_string(a.output_dim());
        throw std::invalid_argument(
            "actors do not match " + std::to_string(num_users) +
            " users: need one 3->2 actor per user or a single full-state actor, got" + shapes);
    }

    if (central)
        return [actor = std::move(actors[0])](const env::Environment& e) {
            return rl::unpack_actions(rl::act_greedy(actor, e.full_state()));
        };
    return [actors = std::move(actors)](const env::Environment& e) {
        std::vector<env::Action> joint;
        const auto& observations = e.observations();
        for (std::size_t k = 0; k < actors.size(); ++k) {
            const auto a = rl::act_greedy(actors[k], std::span<const double>(observations[k].normalized));
            joint.push_back({a[0], a[1]});
        }
        return joint;
    };
}

JointPolicy heuristic_policy(Algorithm algorithm, const SystemConfig& system,
                             const baselines::FpcConfig& fpc, const phy::NetworkScenario& scenario)
{
    if (is_learned(algorithm))
        throw std::invalid_argument(std::string(to_string(algorithm)) + " is not a heuristic");
    const bool local = algorithm == Algorithm::local_first;
    return [=](const env::Environment& e) {
        std::vector<env::Action> joint;
        const auto& observations = e.observations();
        for (std::size_t k = 0; k < observations.size(); ++k)
            joint.push_back(local ? baselines::local_first_action(observations[k], scenario, k, system, fpc)
                                  : baselines::offloading_first_action(observations[k], scenario, k,
                                                                       system, fpc));
        return joint;
    };
}

std::uint64_t evaluation_seed(std::uint64_t seed, int episode)
{
    return derive_seed(seed, Stream::evaluation_episode, static_cast<std::uint64_t>(episode));
}

std::vector<EpisodeMetrics> run_policy(env::Environment& env, const JointPolicy& policy,
                                       int episodes, std::uint64_t seed,
                                       const std::function<void(const EpisodeMetrics&)>& sink)
{
    std::vector<EpisodeMetrics> out;
    for (int ep = 0; ep < episodes; ++ep) {
        env.reset(evaluation_seed(seed, ep));
        EpisodeAccumulator acc;
        while (!env.done()) {
            const auto joint = policy(env);
            acc.add(env.step(joint).outcome);
        }
        out.push_back(acc.finish(ep));
        if (sink)
            sink(out.back());
    }
    return out;
}

std::vector<EpisodeMetrics> evaluate_policy(const std::vector<std::filesystem::path>& checkpoints,
                                            const ExperimentConfig& cfg, int episodes)
{
    cfg.validate();
    std::vector<rl::MlpParams<float>> actors;
    for (const auto& path : checkpoints)
        actors.push_back(rl::load_checkpoint(path).params);
    auto policy = actor_policy(std::move(actors), cfg.system.num_users());
    env::Environment env(cfg.system, build_scenario(cfg));
    return run_policy(env, policy, episodes, cfg.seed);
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, std::string header)
    : path_(path), os_(path, std::ios::out | std::ios::trunc)
{
    if (!os_)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write(header);
}

void MetricsWriter::write(const std::string& row)
{
    os_ << row << '\n';
    if (!os_.flush())
        throw std::runtime_error("write to " + path_.string() + " failed");
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::out | std::ios::trunc);
    os << text;
    if (!os.flush())
        throw std::runtime_error("write to " + path.string() + " failed");
}

template <class T>
std::vector<rl::MlpParams<float>> final_actors(const rl::Team<T>& team)
{
    std::vector<rl::MlpParams<float>> out;
    for (const auto& a : team.agents)
        out.push_back(rl::cast_params<float>(a.actor));
    return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg,
                         const std::function<void(const EpisodeMetrics&)>& progress)
{
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir / kManifestFile, to_config_text(cfg));

    const auto scenario = build_scenario(cfg);
    env::Environment env(cfg.system, scenario);
    RunResult result;
    MetricsWriter metrics(cfg.out_dir / kMetricsFile, kMetricsHeader);
    auto sink = [&](const EpisodeMetrics& m) {
        metrics.write(to_csv_row(m));
        if (progress)
            progress(m);
    };

    if (!is_learned(cfg.algorithm)) {
        const auto policy = heuristic_policy(cfg.algorithm, cfg.system, cfg.fpc, scenario);
        result.metrics = run_policy(env, policy, cfg.episodes, cfg.seed, sink);
        return result;
    }

    const std::size_t users = cfg.system.num_users();
    rl::Team<rl::Real> team;
    if (cfg.algorithm == Algorithm::maddpg) {
        team = rl::make_maddpg_team<rl::Real>(users, cfg.hp, cfg.seed);
        result.metrics = rl::train_maddpg(env, team, cfg.episodes, cfg.hp, cfg.seed, sink).episodes;
    } else {
        team = rl::make_centralized_team<rl::Real>(users, cfg.hp, cfg.seed);
        result.metrics =
            rl::train_ddpg_centralized(env, team, cfg.episodes, cfg.hp, cfg.seed, sink).episodes;
    }

    auto actors = final_actors(team);
    for (std::size_t k = 0; k < actors.size(); ++k) {
        const std::string name = "actor_" + std::to_string(k);
        const auto path = cfg.out_dir / (name + ".ckpt");
        rl::save_checkpoint(path, name, actors[k]);
        result.checkpoints.push_back(path);
    }

    if (cfg.eval_episodes > 0) {
        MetricsWriter eval(cfg.out_dir / kEvalFile, kMetricsHeader);
        const auto policy = actor_policy(std::move(actors), users);
        result.evaluation = run_policy(env, policy, cfg.eval_episodes, cfg.seed,
                                       [&](const EpisodeMetrics& m) { eval.write(to_csv_row(m)); });
    }
    return result;
}

std::filesystem::path compare_architectures(const ExperimentConfig& cfg,
                                            const std::vector<Algorithm>& algorithms,
                                            const std::vector<phy::Architecture>& architectures)
{
    cfg.validate();
    if (algorithms.empty() || architectures.empty())
        throw std::invalid_argument("compare needs at least one algorithm and one architecture");
    std::filesystem::create_directories(cfg.out_dir);
    const auto table_path = cfg.out_dir / kComparisonFile;
    MetricsWriter table(table_path, kComparisonHeader);
    for (auto algorithm : algorithms)
        for (auto architecture : architectures) {
            ExperimentConfig cell = cfg;
            cell.algorithm = algorithm;
            cell.architecture = architecture;
            const std::string prefix =
                std::string(to_string(algorithm)) + "," + std::string(phy::to_string(architecture));
            cell.out_dir = cfg.out_dir / (std::string(to_string(algorithm)) + "_" +
                                          std::string(phy::to_string(architecture)));
            run_experiment(cell, [&](const EpisodeMetrics& m) {
                table.write(prefix + "," + to_csv_row(m));
            });
        }
    return table_path;
}

}  // namespace cfmec::harness
