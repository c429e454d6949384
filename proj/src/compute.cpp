#include "cfmec/compute.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfmec::compute {

double ComputeConfig::deadline_for(std::size_t user) const
{
    return user_deadlines_s.empty() ? deadline_s : user_deadlines_s.at(user);
}

void ComputeConfig::validate(std::size_t num_users) const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("compute: ") + name + " must be positive");
    };
    positive(cycles_per_bit, "cycles_per_bit");
    positive(kappa, "kappa");
    positive(f_local_max_hz, "f_local_max_hz");
    positive(f_edge_hz, "f_edge_hz");
    positive(deadline_s, "deadline_s");
    positive(task_min_bits, "task_min_bits");
    positive(task_max_bits, "task_max_bits");
    positive(slot_s, "slot_s");
    if (task_min_bits > task_max_bits)
        throw std::invalid_argument("compute: task_min_bits exceeds task_max_bits");
    if (!user_deadlines_s.empty()) {
        if (user_deadlines_s.size() != num_users)
            throw std::invalid_argument("compute: need one deadline per user");
        for (double d : user_deadlines_s)
            positive(d, "user deadline");
    }
}

TaskSplit split_task(double task_bits, double alpha, double deadline_s, const ComputeConfig& cfg)
{
    TaskSplit s;
    s.f_local_hz = std::clamp(alpha, 0.0, 1.0) * cfg.f_local_max_hz;
    s.local_bits = std::min(task_bits, deadline_s * s.f_local_hz / cfg.cycles_per_bit);
    s.offload_bits = std::max(0.0, task_bits - s.local_bits);
    return s;
}

LocalCost local_cost(const TaskSplit& split, double deadline_s, const ComputeConfig& cfg)
{
    if (split.local_bits <= 0.0 || split.f_local_hz <= 0.0)
        return {};
    const double cycles = split.local_bits * cfg.cycles_per_bit;
    return {std::min(cycles / split.f_local_hz, deadline_s),
            cfg.kappa * cycles * split.f_local_hz * split.f_local_hz};
}

std::vector<double> edge_allocation(std::span<const double> offload_bits, double f_edge_hz)
{
    std::vector<double> f(offload_bits.size(), 0.0);
    const double total = std::accumulate(offload_bits.begin(), offload_bits.end(), 0.0);
    if (total <= 0.0)
        return f;
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = f_edge_hz * (offload_bits[k] / total);
    return f;
}

OffloadCost offload_cost(double offload_bits, double rate_bps, double f_cpu_hz, double power_w,
                         const ComputeConfig& cfg)
{
    if (offload_bits <= 0.0)
        return {};
    if (rate_bps <= 0.0 || f_cpu_hz <= 0.0) {
        OffloadCost c;
        c.t_tr_s = rate_bps > 0.0 ? offload_bits / rate_bps : kInfeasible;
        c.t_comp_s = f_cpu_hz > 0.0 ? offload_bits * cfg.cycles_per_bit / f_cpu_hz : kInfeasible;
        c.t_offload_s = kInfeasible;
        // The transmitter stays on for the whole slot without delivering the task.
        c.energy_j = cfg.charge_infeasible_slot ? power_w * cfg.slot_s : 0.0;
        return c;
    }
    OffloadCost c;
    c.t_tr_s = offload_bits / rate_bps;
    c.t_comp_s = offload_bits * cfg.cycles_per_bit / f_cpu_hz;
    c.t_offload_s = c.t_tr_s + c.t_comp_s;
    c.energy_j = power_w * c.t_tr_s;
    return c;
}

UserOutcome combine(const TaskSplit& split, const LocalCost& local, const OffloadCost& offload,
                    double deadline_s)
{
    UserOutcome u;
    u.task_bits = split.local_bits + split.offload_bits;
    u.split = split;
    u.t_local_s = local.time_s;
    u.e_local_j = local.energy_j;
    u.t_tr_s = offload.t_tr_s;
    u.t_comp_s = offload.t_comp_s;
    u.t_offload_s = offload.t_offload_s;
    u.e_offload_j = offload.energy_j;
    u.t_total_s = std::max(local.time_s, offload.t_offload_s);
    u.e_total_j = local.energy_j + offload.energy_j;
    u.deadline_met = u.t_total_s <= deadline_s;
    return u;
}

}  // namespace cfmec::compute
