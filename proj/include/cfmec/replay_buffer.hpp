#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cfmec/mlp.hpp"
#include "cfmec/rng.hpp"

namespace cfmec::rl {

/// Column-wise minibatch: column i is transition i.
template <class T>
struct Batch {
    Mat<T> states;
    Mat<T> actions;
    Vec<T> rewards;
    Mat<T> next_states;

    Eigen::Index size() const { return states.cols(); }
};

/// Circular store of (s, a_joint, r, s') transitions.
template <class T>
class ReplayBuffer {
public:
    ReplayBuffer() = default;
    ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim);

    void push(std::span<const double> state, std::span<const double> action, double reward,
              std::span<const double> next_state);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t state_dim() const { return static_cast<std::size_t>(states_.rows()); }
    std::size_t action_dim() const { return static_cast<std::size_t>(actions_.rows()); }

    /// `batch` distinct indices drawn uniformly from the stored transitions.
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;
    Batch<T> gather(std::span<const std::size_t> indices) const;
    Batch<T> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_ = 0;
    std::size_t size_ = 0;
    std::size_t cursor_ = 0;
    Mat<T> states_;
    Mat<T> actions_;
    Vec<T> rewards_;
    Mat<T> next_states_;
};

}  // namespace cfmec::rl
