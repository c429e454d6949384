#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfmec/agent.hpp"
#include "cfmec/baselines.hpp"
#include "cfmec/checkpoint.hpp"
#include "cfmec/env.hpp"
#include "cfmec/metrics.hpp"
#include "cfmec/system_config.hpp"

namespace cfmec::harness {

enum class Algorithm { maddpg, ddpg_central, offload_first, local_first };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);
bool is_learned(Algorithm a);

struct ExperimentConfig {
    SystemConfig system;
    rl::Hyperparams hp;
    baselines::FpcConfig fpc;
    Algorithm algorithm = Algorithm::maddpg;
    phy::Architecture architecture = phy::Architecture::cell_free;
    /// Training episodes; for heuristics, the number of evaluation episodes.
    int episodes = 3000;
    /// Exploration-free evaluation episodes after training.
    int eval_episodes = 100;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "runs/default";

    /// Throws std::invalid_argument naming the offending setting.
    void validate() const;
};

/// 40 APs, 5 users, 800 episodes.
ExperimentConfig desk_scale_config();

/// Config files are flat `key = value` lines; `#` starts a comment. Unknown
/// keys and malformed values are rejected with the line number.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
ExperimentConfig parse_config(std::istream& is, const std::string& source,
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Every key with its resolved value, in a form parse_config reads back.
std::string to_config_text(const ExperimentConfig& cfg);
std::vector<std::string> config_keys();

/// Network drop for the configured seed and architecture. Every architecture
/// shares the same AP and user positions for a given seed.
phy::NetworkScenario build_scenario(const ExperimentConfig& cfg);

/// Maps the environment's current state to a joint action.
using JointPolicy = std::function<std::vector<env::Action>(const env::Environment&)>;

/// Greedy actors. Either one 3-in/2-out actor per user, each fed only its own
/// observation, or a single actor over the full state.
JointPolicy actor_policy(std::vector<rl::MlpParams<float>> actors, std::size_t num_users);
JointPolicy heuristic_policy(Algorithm algorithm, const SystemConfig& system,
                             const baselines::FpcConfig& fpc, const phy::NetworkScenario& scenario);

std::uint64_t evaluation_seed(std::uint64_t seed, int episode);

/// Runs `episodes` exploration-free episodes with fixed per-episode seeds.
std::vector<EpisodeMetrics> run_policy(env::Environment& env, const JointPolicy& policy,
                                       int episodes, std::uint64_t seed,
                                       const std::function<void(const EpisodeMetrics&)>& sink = {});

std::vector<EpisodeMetrics> evaluate_policy(const std::vector<std::filesystem::path>& checkpoints,
                                            const ExperimentConfig& cfg, int episodes);

/// Appends one row per call and flushes it, so a crash keeps every finished row.
class MetricsWriter {
public:
    MetricsWriter(const std::filesystem::path& path, std::string header);
    void write(const std::string& row);

private:
    std::filesystem::path path_;
    std::ofstream os_;
};

struct RunResult {
    /// Training episodes for learned algorithms, evaluation episodes for heuristics.
    std::vector<EpisodeMetrics> metrics;
    /// Exploration-free evaluation after training; empty for heuristics.
    std::vector<EpisodeMetrics> evaluation;
    std::vector<std::filesystem::path> checkpoints;
};

inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kEvalFile = "eval.csv";
inline constexpr const char* kManifestFile = "manifest.txt";

/// Writes the manifest, metrics, evaluation and actor checkpoints under out_dir.
RunResult run_experiment(const ExperimentConfig& cfg,
                         const std::function<void(const EpisodeMetrics&)>& progress = {});

inline constexpr const char* kComparisonHeader =
    "algorithm,architecture,episode,reward,success_rate,mean_energy_j,mean_latency_s";
inline constexpr const char* kComparisonFile = "comparison.csv";

/// One run per (algorithm, architecture) under out_dir/<algorithm>_<architecture>,
/// all with the base seed, collected into a long table keyed by episode.
std::filesystem::path compare_architectures(const ExperimentConfig& cfg,
                                            const std::vector<Algorithm>& algorithms,
                                            const std::vector<phy::Architecture>& architectures);

}  // namespace cfmec::harness
