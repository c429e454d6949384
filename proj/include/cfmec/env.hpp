#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cfmec/compute.hpp"
#include "cfmec/phy.hpp"
#include "cfmec/rng.hpp"
#include "cfmec/system_config.hpp"

namespace cfmec::env {

inline constexpr std::size_t kObsDim = 3;
inline constexpr std::size_t kActionDim = 2;

/// What one agent sees at the start of a step: its task, its deadline and the
/// uplink rate it achieved in the previous step.
struct Observation {
    double task_bits = 0.0;
    double deadline_s = 0.0;
    double prev_rate_bps = 0.0;
    std::array<double, kObsDim> normalized{};
};

/// Local CPU fraction alpha and uplink power fraction eta.
struct Action {
    double alpha = 0.0;
    double eta = 0.0;
};

Action clip(const Action& a);

/// -sum_k xi_k E_k with E_k in mJ, xi_k = 1 on time and 10 on a miss.
double cooperative_reward(const compute::StepOutcome& outcome);

/// Scores one joint action against a fixed channel draw and task vector.
/// Rates are computed jointly from the full power vector.
compute::StepOutcome evaluate_joint_action(const SystemConfig& cfg,
                                           const phy::NetworkScenario& scenario,
                                           const phy::ChannelRealization& channels,
                                           std::span<const double> task_bits,
                                           std::span<const Action> joint);

struct StepResult {
    std::vector<Observation> observations;
    std::vector<double> rewards;
    compute::StepOutcome outcome;
    bool done = false;
};

/// Shared multi-agent environment over one fixed network drop. Small-scale
/// fading and task sizes are redrawn every step; large-scale fading is fixed.
/// Not thread-safe: one instance per thread.
class Environment {
public:
    Environment(SystemConfig cfg, phy::NetworkScenario scenario);

    const std::vector<Observation>& reset(std::uint64_t seed);
    StepResult step(std::span<const Action> joint);

    /// Normalized observations of all agents, concatenated in agent order.
    std::vector<double> full_state() const;

    const std::vector<Observation>& observations() const { return observations_; }
    std::size_t num_users() const { return scenario_.num_users(); }
    int step_index() const { return step_; }
    int horizon() const { return cfg_.env.horizon; }
    bool done() const { return step_ >= cfg_.env.horizon; }
    const SystemConfig& config() const { return cfg_; }
    const phy::NetworkScenario& scenario() const { return scenario_; }
    double rate_normalizer_bps() const { return rate_ref_bps_; }

private:
    void draw_tasks();
    Observation observe(std::size_t k, double prev_rate_bps) const;

    SystemConfig cfg_;
    phy::NetworkScenario scenario_;
    double rate_ref_bps_;
    Rng rng_;
    std::vector<double> tasks_;
    std::vector<Observation> observations_;
    int step_ = 0;
    bool started_ = false;
};

}  // namespace cfmec::env
