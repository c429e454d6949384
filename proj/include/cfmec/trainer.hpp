#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfmec/agent.hpp"
#include "cfmec/env.hpp"
#include "cfmec/metrics.hpp"

namespace cfmec::rl {

/// Scalar type of the networks used for training runs. Gradient checks use double.
using Real = float;

/// A set of agents acting on one environment. MADDPG has one agent per user
/// reading its own observation; the centralized variant has a single agent
/// reading the full state and emitting every user's action.
template <class T>
struct Team {
    std::vector<AgentBundle<T>> agents;
    std::size_t state_dim = 0;
    std::size_t joint_action_dim = 0;

    std::vector<AgentLayout> layouts() const;
    std::vector<const MlpParams<T>*> actors() const;
    std::vector<const MlpParams<T>*> target_actors() const;
};

template <class T>
Team<T> make_maddpg_team(std::size_t num_users, const Hyperparams& hp, std::uint64_t seed);

template <class T>
Team<T> make_centralized_team(std::size_t num_users, const Hyperparams& hp, std::uint64_t seed);

/// Joint action vector (alpha_0, eta_0, alpha_1, ...) from the full state.
template <class T>
std::vector<double> team_act(Team<T>& team, std::span<const double> state, bool explore,
                             double sigma);

/// One critic pass, one actor pass and one soft update for every agent. Actor
/// passes read a snapshot of all current actors taken after the critic pass.
template <class T>
void update_round(Team<T>& team, const Hyperparams& hp);

std::vector<env::Action> unpack_actions(std::span<const double> joint);

struct TrainingHistory {
    std::vector<EpisodeMetrics> episodes;
    std::size_t update_rounds = 0;
};

using EpisodeCallback = std::function<void(const EpisodeMetrics&)>;

/// Interaction + learning loop shared by both algorithms.
template <class T>
TrainingHistory train_team(env::Environment& env, Team<T>& team, int episodes,
                           const Hyperparams& hp, std::uint64_t seed,
                           const EpisodeCallback& on_episode = {});

/// Checks the team is one local-observation agent per user, then trains.
template <class T>
TrainingHistory train_maddpg(env::Environment& env, Team<T>& team, int episodes,
                             const Hyperparams& hp, std::uint64_t seed,
                             const EpisodeCallback& on_episode = {});

/// Checks the team is one full-state agent for all users, then trains.
template <class T>
TrainingHistory train_ddpg_centralized(env::Environment& env, Team<T>& team, int episodes,
                                       const Hyperparams& hp, std::uint64_t seed,
                                       const EpisodeCallback& on_episode = {});

}  // namespace cfmec::rl
