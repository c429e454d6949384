#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace cfmec::compute {

struct ComputeConfig {
    double cycles_per_bit = 500.0;
    /// Effective switched capacitance (J s^2 / cycle^3).
    double kappa = 1e-27;
    double f_local_max_hz = 1e9;
    double f_edge_hz = 100e9;
    double deadline_s = 1e-3;
    /// Optional per-user deadlines; empty means every user uses deadline_s.
    std::vector<double> user_deadlines_s;
    double task_min_bits = 2500.0;
    double task_max_bits = 7500.0;
    /// Step length (coherence time).
    double slot_s = 1e-3;
    /// Charge p * slot_s when offloaded bits can never be delivered (zero rate).
    bool charge_infeasible_slot = true;

    double deadline_for(std::size_t user) const;
    void validate(std::size_t num_users) const;
};

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct TaskSplit {
    double local_bits = 0.0;
    double offload_bits = 0.0;
    double f_local_hz = 0.0;
};

struct LocalCost {
    double time_s = 0.0;
    double energy_j = 0.0;
};

struct OffloadCost {
    double t_tr_s = 0.0;
    double t_comp_s = 0.0;
    double t_offload_s = 0.0;
    double energy_j = 0.0;

    bool infeasible() const { return t_offload_s == kInfeasible; }
};

/// Per-user result of one step.
struct UserOutcome {
    double task_bits = 0.0;
    double rate_bps = 0.0;
    double power_w = 0.0;
    TaskSplit split;
    double t_local_s = 0.0;
    double t_tr_s = 0.0;
    double t_comp_s = 0.0;
    double t_offload_s = 0.0;
    double t_total_s = 0.0;
    double e_local_j = 0.0;
    double e_offload_j = 0.0;
    double e_total_j = 0.0;
    bool deadline_met = true;
};

struct StepOutcome {
    std::vector<UserOutcome> users;
    /// Cooperative reward shared by every agent (energies in mJ).
    double reward = 0.0;
};

TaskSplit split_task(double task_bits, double alpha, double deadline_s, const ComputeConfig& cfg);

LocalCost local_cost(const TaskSplit& split, double deadline_s, const ComputeConfig& cfg);

/// Edge CPU share of every user, proportional to its offloaded bits.
std::vector<double> edge_allocation(std::span<const double> offload_bits, double f_edge_hz);

OffloadCost offload_cost(double offload_bits, double rate_bps, double f_cpu_hz, double power_w,
                         const ComputeConfig& cfg);

UserOutcome combine(const TaskSplit& split, const LocalCost& local, const OffloadCost& offload,
                    double deadline_s);

}  // namespace cfmec::compute
