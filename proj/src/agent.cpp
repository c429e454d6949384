#include "cfmec/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmec::rl {

double ExplorationSchedule::sigma(int episode) const
{
    return std::max(floor_sigma, initial_sigma * std::pow(decay, episode));
}

double bound_action(double v, NoiseBoundary boundary)
{
    if (boundary == NoiseBoundary::reflect && std::isfinite(v)) {
        // Fold onto [0, 1] with period 2.
        v = std::fmod(std::abs(v), 2.0);
        if (v > 1.0)
            v = 2.0 - v;
    }
    return std::clamp(v, 0.0, 1.0);
}

std::optional<NoiseBoundary> parse_noise_boundary(std::string_view s)
{
    if (s == "clip")
        return NoiseBoundary::clip;
    if (s == "reflect")
        return NoiseBoundary::reflect;
    return std::nullopt;
}

const char* to_string(NoiseBoundary b)
{
    return b == NoiseBoundary::clip ? "clip" : "reflect";
}

void Hyperparams::validate() const
{
    if (!(lr_actor > 0.0) || !(lr_critic > 0.0))
        throw std::invalid_argument("learning rates must be positive");
    if (!(discount >= 0.0 && discount <= 1.0))
        throw std::invalid_argument("discount must lie in [0, 1]");
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("soft-update rate must lie in [0, 1]");
    if (batch_size == 0 || replay_capacity < batch_size)
        throw std::invalid_argument("replay capacity must hold at least one batch");
    if (hidden.empty() || std::any_of(hidden.begin(), hidden.end(), [](int h) { return h <= 0; }))
        throw std::invalid_argument("hidden layer sizes must be positive");
    if (noise.initial_sigma < 0.0 || noise.floor_sigma < 0.0 || noise.decay <= 0.0)
        throw std::invalid_argument("invalid exploration schedule");
}

namespace {

std::vector<int> layer_sizes(std::size_t in, const std::vector<int>& hidden, std::size_t out)
{
    std::vector<int> s;
    s.push_back(static_cast<int>(in));
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(static_cast<int>(out));
    return s;
}

template <class T>
Mat<T> critic_input(const Mat<T>& states, const Mat<T>& actions)
{
    Mat<T> x(states.rows() + actions.rows(), states.cols());
    x.topRows(states.rows()) = states;
    x.bottomRows(actions.rows()) = actions;
    return x;
}

}  // namespace

template <class T>
AgentBundle<T> make_bundle(const AgentLayout& layout, std::size_t state_dim,
                           std::size_t joint_action_dim, const Hyperparams& hp,
                           std::uint64_t seed, std::size_t agent_index)
{
    hp.validate();
    if (layout.obs_offset + layout.obs_dim > state_dim ||
        layout.action_offset + layout.action_dim > joint_action_dim)
        throw std::invalid_argument("agent layout does not fit the state/action dimensions");

    AgentBundle<T> b;
    b.layout = layout;
    Rng actor_rng = make_rng(seed, Stream::actor_init, agent_index);
    Rng critic_rng = make_rng(seed, Stream::critic_init, agent_index);
    const auto actor_sizes = layer_sizes(layout.obs_dim, hp.hidden, layout.action_dim);
    const auto critic_sizes = layer_sizes(state_dim + joint_action_dim, hp.hidden, 1);
    b.actor = make_mlp<T>(actor_sizes, OutputActivation::sigmoid, actor_rng, hp.final_actor_scale);
    b.critic = make_mlp<T>(critic_sizes, OutputActivation::identity, critic_rng);
    b.actor_target = b.actor;
    b.critic_target = b.critic;
    b.actor_opt = make_adam(b.actor, hp.lr_actor);
    b.critic_opt = make_adam(b.critic, hp.lr_critic);
    b.buffer = ReplayBuffer<T>(hp.replay_capacity, state_dim, joint_action_dim);
    b.boundary = hp.noise.boundary;
    b.noise_rng = make_rng(seed, Stream::exploration, agent_index);
    b.sample_rng = make_rng(seed, Stream::replay_sampling, agent_index);
    return b;
}

template <class T>
std::vector<double> act_greedy(const MlpParams<T>& actor, std::span<const double> observation)
{
    std::vector<T> x(observation.begin(), observation.end());
    const Vec<T> y = mlp_predict(actor, std::span<const T>(x));
    std::vector<double> a(static_cast<std::size_t>(y.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = std::clamp(static_cast<double>(y(static_cast<Eigen::Index>(i))), 0.0, 1.0);
    return a;
}

template <class T>
std::vector<double> act(AgentBundle<T>& bundle, std::span<const double> observation, bool explore,
                        double sigma)
{
    if (observation.size() != bundle.layout.obs_dim)
        throw std::invalid_argument("observation has the wrong dimension for this agent");
    std::vector<T> x(observation.begin(), observation.end());
    const Vec<T> mu = mlp_predict(bundle.actor, std::span<const T>(x));
    std::vector<double> a(static_cast<std::size_t>(mu.size()));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = static_cast<double>(mu(static_cast<Eigen::Index>(i)));
        if (explore)
            v += sigma * noise(bundle.noise_rng);
        a[i] = explore ? bound_action(v, bundle.boundary) : std::clamp(v, 0.0, 1.0);
    }
    return a;
}

template <class T>
Mat<T> joint_actions(std::span<const MlpParams<T>* const> actors,
                     std::span<const AgentLayout> layouts, const Mat<T>& states,
                     std::size_t joint_action_dim)
{
    Mat<T> a(static_cast<Eigen::Index>(joint_action_dim), states.cols());
    for (std::size_t j = 0; j < layouts.size(); ++j) {
        const auto& lj = layouts[j];
        const Mat<T> obs = states.middleRows(static_cast<Eigen::Index>(lj.obs_offset),
                                             static_cast<Eigen::Index>(lj.obs_dim));
        a.middleRows(static_cast<Eigen::Index>(lj.action_offset),
                     static_cast<Eigen::Index>(lj.action_dim)) =
            mlp_forward(*actors[j], obs).output();
    }
    return a;
}

template <class T>
Vec<T> td_targets(const AgentBundle<T>& bundle, const Batch<T>& batch,
                  std::span<const MlpParams<T>* const> target_actors,
                  std::span<const AgentLayout> layouts, double discount)
{
    const Mat<T> next_a = joint_actions(target_actors, layouts, batch.next_states,
                                        static_cast<std::size_t>(batch.actions.rows()));
    const auto q_next = mlp_forward(bundle.critic_target, critic_input(batch.next_states, next_a));
    return batch.rewards + static_cast<T>(discount) * q_next.output().row(0).transpose();
}

template <class T>
CriticLoss<T> critic_loss(const AgentBundle<T>& bundle, const Batch<T>& batch,
                          std::span<const MlpParams<T>* const> target_actors,
                          std::span<const AgentLayout> layouts, double discount)
{
    const Vec<T> y = td_targets(bundle, batch, target_actors, layouts, discount);
    const auto cache = mlp_forward(bundle.critic, critic_input(batch.states, batch.actions));
    const Mat<T> residual = cache.output() - y.transpose();
    const auto n = static_cast<T>(batch.size());
    const Mat<T> d_out = (T(2) / n) * residual;
    return {static_cast<double>(residual.squaredNorm()) / static_cast<double>(n),
            mlp_backward(bundle.critic, cache, d_out).params};
}

template <class T>
double critic_update(AgentBundle<T>& bundle, const Batch<T>& batch,
                     std::span<const MlpParams<T>* const> target_actors,
                     std::span<const AgentLayout> layouts, double discount)
{
    auto l = critic_loss(bundle, batch, target_actors, layouts, discount);
    adam_step(bundle.critic_opt, bundle.critic, l.grads);
    return l.loss;
}

template <class T>
ParamGrads<T> policy_gradient(const AgentBundle<T>& bundle, std::size_t agent_index,
                              const Batch<T>& batch, std::span<const MlpParams<T>* const> actors,
                              std::span<const AgentLayout> layouts)
{
    const auto& own = layouts[agent_index];
    const auto joint_dim = static_cast<std::size_t>(batch.actions.rows());
    Mat<T> a(static_cast<Eigen::Index>(joint_dim), batch.size());
    MlpCache<T> own_cache;
    for (std::size_t j = 0; j < layouts.size(); ++j) {
        const auto& lj = layouts[j];
        const Mat<T> obs = batch.states.middleRows(static_cast<Eigen::Index>(lj.obs_offset),
                                                   static_cast<Eigen::Index>(lj.obs_dim));
        if (j == agent_index) {
            own_cache = mlp_forward(bundle.actor, obs);
            a.middleRows(static_cast<Eigen::Index>(lj.action_offset),
                         static_cast<Eigen::Index>(lj.action_dim)) = own_cache.output();
        } else {
            a.middleRows(static_cast<Eigen::Index>(lj.action_offset),
                         static_cast<Eigen::Index>(lj.action_dim)) =
                mlp_forward(*actors[j], obs).output();
        }
    }

    const auto q_cache = mlp_forward(bundle.critic, critic_input(batch.states, a));
    // d(mean Q)/dQ_i = 1/B
    const Mat<T> d_q = Mat<T>::Constant(1, batch.size(), T(1) / static_cast<T>(batch.size()));
    const auto q_back = mlp_backward(bundle.critic, q_cache, d_q, false);
    const Mat<T> d_action = q_back.input_grad.middleRows(
        static_cast<Eigen::Index>(batch.states.rows() + static_cast<Eigen::Index>(own.action_offset)),
        static_cast<Eigen::Index>(own.action_dim));
    return mlp_backward(bundle.actor, own_cache, d_action).params;
}

template <class T>
double actor_update(AgentBundle<T>& bundle, std::size_t agent_index, const Batch<T>& batch,
                    std::span<const MlpParams<T>* const> actors,
                    std::span<const AgentLayout> layouts)
{
    auto grads = policy_gradient(bundle, agent_index, batch, actors, layouts);
    const double norm = grad_norm(grads);
    // ascend mean Q by descending -Q
    for (auto& l : grads) {
        l.weight = -l.weight;
        l.bias = -l.bias;
    }
    adam_step(bundle.actor_opt, bundle.actor, grads);
    return norm;
}

#define CFMEC_INSTANTIATE_AGENT(T)                                                              \
    template AgentBundle<T> make_bundle<T>(const AgentLayout&, std::size_t, std::size_t,        \
                                           const Hyperparams&, std::uint64_t, std::size_t);     \
    template std::vector<double> act<T>(AgentBundle<T>&, std::span<const double>, bool, double); \
    template std::vector<double> act_greedy<T>(const MlpParams<T>&, std::span<const double>);   \
    template Mat<T> joint_actions<T>(std::span<const MlpParams<T>* const>,                      \
                                     std::span<const AgentLayout>, const Mat<T>&, std::size_t); \
    template Vec<T> td_targets<T>(const AgentBundle<T>&, const Batch<T>&,                       \
                                  std::span<const MlpParams<T>* const>,                         \
                                  std::span<const AgentLayout>, double);                        \
    template CriticLoss<T> critic_loss<T>(const AgentBundle<T>&, const Batch<T>&,              \
                                          std::span<const MlpParams<T>* const>,                 \
                                          std::span<const AgentLayout>, double);                \
    template double critic_update<T>(AgentBundle<T>&, const Batch<T>&,                          \
                                     std::span<const MlpParams<T>* const>,                      \
                                     std::span<const AgentLayout>, double);                     \
    template ParamGrads<T> policy_gradient<T>(const AgentBundle<T>&, std::size_t,               \
                                              const Batch<T>&,                                  \
                                              std::span<const MlpParams<T>* const>,             \
                                              std::span<const AgentLayout>);                    \
    template double actor_update<T>(AgentBundle<T>&, std::size_t, const Batch<T>&,              \
                                    std::span<const MlpParams<T>* const>,                       \
                                    std::span<const AgentLayout>);

CFMEC_INSTANTIATE_AGENT(float)
CFMEC_INSTANTIATE_AGENT(double)

}  // namespace cfmec::rl
