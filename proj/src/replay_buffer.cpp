#include "cfmec/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfmec::rl {

template <class T>
ReplayBuffer<T>::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
    : capacity_(capacity)
{
    if (capacity == 0)
        throw std::invalid_argument("replay buffer capacity must be positive");
    const auto cap = static_cast<Eigen::Index>(capacity);
    states_.resize(static_cast<Eigen::Index>(state_dim), cap);
    actions_.resize(static_cast<Eigen::Index>(action_dim), cap);
    rewards_.resize(cap);
    next_states_.resize(static_cast<Eigen::Index>(state_dim), cap);
}

template <class T>
void ReplayBuffer<T>::push(std::span<const double> state, std::span<const double> action,
                           double reward, std::span<const double> next_state)
{
    if (state.size() != state_dim() || next_state.size() != state_dim() ||
        action.size() != action_dim())
        throw std::invalid_argument("transition does not match the replay buffer layout");
    const auto c = static_cast<Eigen::Index>(cursor_);
    for (std::size_t i = 0; i < state.size(); ++i) {
        states_(static_cast<Eigen::Index>(i), c) = static_cast<T>(state[i]);
        next_states_(static_cast<Eigen::Index>(i), c) = static_cast<T>(next_state[i]);
    }
    for (std::size_t i = 0; i < action.size(); ++i)
        actions_(static_cast<Eigen::Index>(i), c) = static_cast<T>(action[i]);
    rewards_(c) = static_cast<T>(reward);
    cursor_ = (cursor_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

template <class T>
std::vector<std::size_t> ReplayBuffer<T>::sample_indices(std::size_t batch, Rng& rng) const
{
    if (batch > size_)
        throw std::logic_error("cannot sample more transitions than are stored");
    // Floyd's algorithm: uniform subset of size `batch` without replacement.
    std::vector<std::size_t> picked;
    picked.reserve(batch);
    for (std::size_t j = size_ - batch; j < size_; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end())
            picked.push_back(t);
        else
            picked.push_back(j);
    }
    return picked;
}

template <class T>
Batch<T> ReplayBuffer<T>::gather(std::span<const std::size_t> indices) const
{
    const auto n = static_cast<Eigen::Index>(indices.size());
    Batch<T> b;
    b.states.resize(states_.rows(), n);
    b.actions.resize(actions_.rows(), n);
    b.rewards.resize(n);
    b.next_states.resize(next_states_.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
        b.states.col(i) = states_.col(src);
        b.actions.col(i) = actions_.col(src);
        b.rewards(i) = rewards_(src);
        b.next_states.col(i) = next_states_.col(src);
    }
    return b;
}

template <class T>
Batch<T> ReplayBuffer<T>::sample(std::size_t batch, Rng& rng) const
{
    const auto idx = sample_indices(batch, rng);
    return gather(idx);
}

template class ReplayBuffer<float>;
template class ReplayBuffer<double>;

}  // namespace cfmec::rl
