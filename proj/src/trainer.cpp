#include "cfmec/trainer.hpp"

#include <stdexcept>

namespace cfmec::rl {

template <class T>
std::vector<AgentLayout> Team<T>::layouts() const
{
    std::vector<AgentLayout> l;
    for (const auto& a : agents)
        l.push_back(a.layout);
    return l;
}

template <class T>
std::vector<const MlpParams<T>*> Team<T>::actors() const
{
    std::vector<const MlpParams<T>*> p;
    for (const auto& a : agents)
        p.push_back(&a.actor);
    return p;
}

template <class T>
std::vector<const MlpParams<T>*> Team<T>::target_actors() const
{
    std::vector<const MlpParams<T>*> p;
    for (const auto& a : agents)
        p.push_back(&a.actor_target);
    return p;
}

template <class T>
Team<T> make_maddpg_team(std::size_t num_users, const Hyperparams& hp, std::uint64_t seed)
{
    Team<T> t;
    t.state_dim = num_users * env::kObsDim;
    t.joint_action_dim = num_users * env::kActionDim;
    for (std::size_t k = 0; k < num_users; ++k) {
        const AgentLayout layout{k * env::kObsDim, env::kObsDim, k * env::kActionDim,
                                 env::kActionDim};
        t.agents.push_back(make_bundle<T>(layout, t.state_dim, t.joint_action_dim, hp, seed, k));
    }
    return t;
}

template <class T>
Team<T> make_centralized_team(std::size_t num_users, const Hyperparams& hp, std::uint64_t seed)
{
    Team<T> t;
    t.state_dim = num_users * env::kObsDim;
    t.joint_action_dim = num_users * env::kActionDim;
    const AgentLayout layout{0, t.state_dim, 0, t.joint_action_dim};
    t.agents.push_back(make_bundle<T>(layout, t.state_dim, t.joint_action_dim, hp, seed, 0));
    return t;
}

template <class T>
std::vector<double> team_act(Team<T>& team, std::span<const double> state, bool explore,
                             double sigma)
{
    std::vector<double> joint(team.joint_action_dim, 0.0);
    for (auto& agent : team.agents) {
        const auto& l = agent.layout;
        const auto a = act(agent, state.subspan(l.obs_offset, l.obs_dim), explore, sigma);
        std::copy(a.begin(), a.end(), joint.begin() + static_cast<long>(l.action_offset));
    }
    return joint;
}

template <class T>
void update_round(Team<T>& team, const Hyperparams& hp)
{
    const auto layouts = team.layouts();
    std::vector<Batch<T>> batches;
    batches.reserve(team.agents.size());
    for (auto& agent : team.agents)
        batches.push_back(agent.buffer.sample(hp.batch_size, agent.sample_rng));

    // Target actors only move in the soft-update phase below.
    const auto targets = team.target_actors();
    for (std::size_t k = 0; k < team.agents.size(); ++k)
        critic_update(team.agents[k], batches[k], std::span<const MlpParams<T>* const>(targets),
                      layouts, hp.discount);

    std::vector<MlpParams<T>> snapshot;
    std::vector<const MlpParams<T>*> current;
    if (team.agents.size() > 1) {
        snapshot.reserve(team.agents.size());
        for (const auto& agent : team.agents)
            snapshot.push_back(agent.actor);
        for (const auto& s : snapshot)
            current.push_back(&s);
    } else {
        current = team.actors();
    }
    for (std::size_t k = 0; k < team.agents.size(); ++k)
        actor_update(team.agents[k], k, batches[k], std::span<const MlpParams<T>* const>(current),
                     layouts);

    for (auto& agent : team.agents) {
        soft_update(agent.actor_target, agent.actor, hp.tau);
        soft_update(agent.critic_target, agent.critic, hp.tau);
    }
}

std::vector<env::Action> unpack_actions(std::span<const double> joint)
{
    std::vector<env::Action> actions;
    for (std::size_t i = 0; i + 1 < joint.size(); i += env::kActionDim)
        actions.push_back({joint[i], joint[i + 1]});
    return actions;
}

template <class T>
TrainingHistory train_team(env::Environment& env, Team<T>& team, int episodes,
                           const Hyperparams& hp, std::uint64_t seed,
                           const EpisodeCallback& on_episode)
{
    hp.validate();
    if (team.agents.empty())
        throw std::invalid_argument("team has no agents");
    if (team.state_dim != env.num_users() * env::kObsDim ||
        team.joint_action_dim != env.num_users() * env::kActionDim)
        throw std::invalid_argument("team dimensions do not match the environment");

    const std::size_t ready = std::max(hp.warmup, hp.batch_size);
    TrainingHistory history;
    for (int ep = 0; ep < episodes; ++ep) {
        const double sigma = hp.noise.sigma(ep);
        env.reset(derive_seed(seed, Stream::training_episode, static_cast<std::uint64_t>(ep)));
        EpisodeAccumulator acc;
        auto state = env.full_state();
        while (!env.done()) {
            const auto joint = team_act(team, state, true, sigma);
            const auto result = env.step(unpack_actions(joint));
            auto next_state = env.full_state();
            for (std::size_t k = 0; k < team.agents.size(); ++k)
                team.agents[k].buffer.push(state, joint, result.rewards[k], next_state);
            acc.add(result.outcome);
            if (team.agents.front().buffer.size() >= ready) {
                update_round(team, hp);
                ++history.update_rounds;
            }
            state = std::move(next_state);
        }
        history.episodes.push_back(acc.finish(ep));
        if (on_episode)
            on_episode(history.episodes.back());
    }
    return history;
}

template <class T>
TrainingHistory train_maddpg(env::Environment& env, Team<T>& team, int episodes,
                             const Hyperparams& hp, std::uint64_t seed,
                             const EpisodeCallback& on_episode)
{
    if (team.agents.size() != env.num_users())
        throw std::invalid_argument("MADDPG needs one agent per user");
    for (std::size_t k = 0; k < team.agents.size(); ++k) {
        const auto& l = team.agents[k].layout;
        if (l.obs_offset != k * env::kObsDim || l.obs_dim != env::kObsDim ||
            l.action_offset != k * env::kActionDim || l.action_dim != env::kActionDim)
            throw std::invalid_argument("MADDPG agent does not read only its own observation");
    }
    return train_team(env, team, episodes, hp, seed, on_episode);
}

template <class T>
TrainingHistory train_ddpg_centralized(env::Environment& env, Team<T>& team, int episodes,
                                       const Hyperparams& hp, std::uint64_t seed,
                                       const EpisodeCallback& on_episode)
{
    if (team.agents.size() != 1 || team.agents.front().layout.obs_dim != team.state_dim ||
        team.agents.front().layout.action_dim != team.joint_action_dim)
        throw std::invalid_argument("centralized DDPG needs a single full-state agent");
    return train_team(env, team, episodes, hp, seed, on_episode);
}

#define CFMEC_INSTANTIATE_TRAINER(T)                                                            \
    template struct Team<T>;                                                                    \
    template Team<T> make_maddpg_team<T>(std::size_t, const Hyperparams&, std::uint64_t);       \
    template Team<T> make_centralized_team<T>(std::size_t, const Hyperparams&, std::uint64_t);  \
    template std::vector<double> team_act<T>(Team<T>&, std::span<const double>, bool, double);  \
    template void update_round<T>(Team<T>&, const Hyperparams&);                                \
    template TrainingHistory train_team<T>(env::Environment&, Team<T>&, int, const Hyperparams&, \
                                           std::uint64_t, const EpisodeCallback&);              \
    template TrainingHistory train_maddpg<T>(env::Environment&, Team<T>&, int,                  \
                                             const Hyperparams&, std::uint64_t,                 \
                                             const EpisodeCallback&);                           \
    template TrainingHistory train_ddpg_centralized<T>(env::Environment&, Team<T>&, int,        \
                                                       const Hyperparams&, std::uint64_t,       \
                                                       const EpisodeCallback&);

CFMEC_INSTANTIATE_TRAINER(float)
CFMEC_INSTANTIATE_TRAINER(double)

}  // namespace cfmec::rl
