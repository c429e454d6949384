#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cfmec/adam.hpp"
#include "cfmec/mlp.hpp"
#include "cfmec/replay_buffer.hpp"
#include "cfmec/rng.hpp"

namespace cfmec::rl {

/// How a noisy action is brought back into [0, 1]. Clipping piles probability
/// mass on the exact boundary; reflection folds it back inside.
enum class NoiseBoundary { clip, reflect };

std::optional<NoiseBoundary> parse_noise_boundary(std::string_view s);
const char* to_string(NoiseBoundary b);

double bound_action(double v, NoiseBoundary boundary);

/// Gaussian exploration whose deviation decays geometrically per episode.
struct ExplorationSchedule {
    double initial_sigma = 0.2;
    double decay = 0.9995;
    double floor_sigma = 0.01;
    NoiseBoundary boundary = NoiseBoundary::reflect;

    double sigma(int episode) const;
};

struct Hyperparams {
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    double discount = 0.99;
    double tau = 0.005;
    std::size_t batch_size = 128;
    std::size_t replay_capacity = 100000;
    std::size_t warmup = 1000;
    std::vector<int> hidden = {128, 64, 64};
    double final_actor_scale = 0.1;
    ExplorationSchedule noise;

    void validate() const;
};

/// Where an agent's actor reads its input in the full state and which joint
/// action slots it writes.
struct AgentLayout {
    std::size_t obs_offset = 0;
    std::size_t obs_dim = 0;
    std::size_t action_offset = 0;
    std::size_t action_dim = 0;
};

template <class T>
struct AgentBundle {
    AgentLayout layout;
    MlpParams<T> actor;
    MlpParams<T> critic;
    MlpParams<T> actor_target;
    MlpParams<T> critic_target;
    AdamState<T> actor_opt;
    AdamState<T> critic_opt;
    ReplayBuffer<T> buffer;
    NoiseBoundary boundary = NoiseBoundary::reflect;
    Rng noise_rng;
    Rng sample_rng;
};

/// Critic sees the full state and the joint action; the actor only its slice.
template <class T>
AgentBundle<T> make_bundle(const AgentLayout& layout, std::size_t state_dim,
                           std::size_t joint_action_dim, const Hyperparams& hp,
                           std::uint64_t seed, std::size_t agent_index);

/// mu(o) plus N(0, sigma^2) per dimension when exploring, brought back into
/// [0, 1] by the bundle's boundary rule.
/// Only the agent's own observation is consulted.
template <class T>
std::vector<double> act(AgentBundle<T>& bundle, std::span<const double> observation, bool explore,
                        double sigma);

template <class T>
std::vector<double> act_greedy(const MlpParams<T>& actor, std::span<const double> observation);

/// Evaluates every agent's actor on its slice of `states` and assembles the
/// joint action matrix (joint_action_dim x batch).
template <class T>
Mat<T> joint_actions(std::span<const MlpParams<T>* const> actors,
                     std::span<const AgentLayout> layouts, const Mat<T>& states,
                     std::size_t joint_action_dim);

/// TD targets r + discount * Q'(s', mu'(s')).
template <class T>
Vec<T> td_targets(const AgentBundle<T>& bundle, const Batch<T>& batch,
                  std::span<const MlpParams<T>* const> target_actors,
                  std::span<const AgentLayout> layouts, double discount);

template <class T>
struct CriticLoss {
    double loss = 0.0;
    ParamGrads<T> grads;
};

/// Mean squared TD error over the batch and its gradient in the critic parameters.
template <class T>
CriticLoss<T> critic_loss(const AgentBundle<T>& bundle, const Batch<T>& batch,
                          std::span<const MlpParams<T>* const> target_actors,
                          std::span<const AgentLayout> layouts, double discount);

/// One Adam step on the critic's mean squared TD error; returns the pre-step loss.
template <class T>
double critic_update(AgentBundle<T>& bundle, const Batch<T>& batch,
                     std::span<const MlpParams<T>* const> target_actors,
                     std::span<const AgentLayout> layouts, double discount);

/// Deterministic policy gradient of mean Q with respect to this agent's actor
/// parameters; other agents' action slots come from `actors` and are held fixed.
template <class T>
ParamGrads<T> policy_gradient(const AgentBundle<T>& bundle, std::size_t agent_index,
                              const Batch<T>& batch, std::span<const MlpParams<T>* const> actors,
                              std::span<const AgentLayout> layouts);

/// One Adam ascent step along the policy gradient; returns its norm.
template <class T>
double actor_update(AgentBundle<T>& bundle, std::size_t agent_index, const Batch<T>& batch,
                    std::span<const MlpParams<T>* const> actors,
                    std::span<const AgentLayout> layouts);

}  // namespace cfmec::rl
