#include "cfmec/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmec::env {

namespace {

double unit_clip(double v)
{
    if (std::isnan(v))
        return 0.0;
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

Action clip(const Action& a)
{
    return {unit_clip(a.alpha), unit_clip(a.eta)};
}

double cooperative_reward(const compute::StepOutcome& outcome)
{
    double penalty = 0.0;
    for (const auto& u : outcome.users)
        penalty += (u.deadline_met ? 1.0 : 10.0) * u.e_total_j * 1e3;
    return -penalty;
}

compute::StepOutcome evaluate_joint_action(const SystemConfig& cfg,
                                           const phy::NetworkScenario& scenario,
                                           const phy::ChannelRealization& channels,
                                           std::span<const double> task_bits,
                                           std::span<const Action> joint)
{
    const std::size_t k_users = scenario.num_users();
    if (joint.size() != k_users || task_bits.size() != k_users)
        throw std::invalid_argument("joint action or task vector has the wrong number of users");

    const auto& cc = cfg.compute;
    std::vector<double> powers(k_users);
    std::vector<compute::TaskSplit> splits(k_users);
    std::vector<double> offload(k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
        const Action a = clip(joint[k]);
        powers[k] = a.eta * cfg.radio.max_ul_power_w;
        splits[k] = compute::split_task(task_bits[k], a.alpha, cc.deadline_for(k), cc);
        offload[k] = splits[k].offload_bits;
    }

    const auto sinr =
        phy::uplink_sinr(powers, channels, scenario.clusters, cfg.radio.noise_power_w());
    const auto f_cpu = compute::edge_allocation(offload, cc.f_edge_hz);
    const double prelog = cfg.radio.prelog(k_users);

    compute::StepOutcome out;
    out.users.reserve(k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
        const double deadline = cc.deadline_for(k);
        const double rate = phy::achievable_rate(sinr[k], cfg.radio.bandwidth_hz, prelog);
        const auto local = compute::local_cost(splits[k], deadline, cc);
        const auto off = compute::offload_cost(offload[k], rate, f_cpu[k], powers[k], cc);
        auto u = compute::combine(splits[k], local, off, deadline);
        u.task_bits = task_bits[k];
        u.rate_bps = rate;
        u.power_w = powers[k];
        out.users.push_back(u);
    }
    out.reward = cooperative_reward(out);
    return out;
}

Environment::Environment(SystemConfig cfg, phy::NetworkScenario scenario)
    : cfg_(std::move(cfg)), scenario_(std::move(scenario))
{
    cfg_.validate();
    if (scenario_.num_users() != cfg_.num_users())
        throw std::invalid_argument("scenario user count does not match the configuration");
    if (scenario_.clusters.size() != scenario_.num_users())
        throw std::invalid_argument("scenario has no cluster for every user");
    rate_ref_bps_ = phy::achievable_rate(cfg_.env.rate_ref_sinr, cfg_.radio.bandwidth_hz);
}

void Environment::draw_tasks()
{
    std::uniform_real_distribution<double> task(cfg_.compute.task_min_bits,
                                                cfg_.compute.task_max_bits);
    for (auto& t : tasks_)
        t = task(rng_);
}

Observation Environment::observe(std::size_t k, double prev_rate_bps) const
{
    Observation o;
    o.task_bits = tasks_[k];
    o.deadline_s = cfg_.compute.deadline_for(k);
    o.prev_rate_bps = prev_rate_bps;
    o.normalized = {unit_clip(o.task_bits / cfg_.compute.task_max_bits),
                    unit_clip(o.deadline_s / cfg_.compute.slot_s),
                    unit_clip(o.prev_rate_bps / rate_ref_bps_)};
    return o;
}

const std::vector<Observation>& Environment::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    step_ = 0;
    started_ = true;
    tasks_.assign(num_users(), 0.0);
    draw_tasks();
    observations_.clear();
    for (std::size_t k = 0; k < num_users(); ++k)
        observations_.push_back(observe(k, 0.0));
    return observations_;
}

StepResult Environment::step(std::span<const Action> joint)
{
    if (!started_)
        throw std::logic_error("step() called before reset()");
    if (done())
        throw std::logic_error("step() called after the episode ended");

    const auto channels = phy::draw_channels(scenario_, cfg_.radio, rng_);
    StepResult r;
    r.outcome = evaluate_joint_action(cfg_, scenario_, channels, tasks_, joint);
    r.rewards.assign(num_users(), r.outcome.reward);
    ++step_;
    r.done = done();

    draw_tasks();
    observations_.clear();
    for (std::size_t k = 0; k < num_users(); ++k)
        observations_.push_back(observe(k, r.outcome.users[k].rate_bps));
    r.observations = observations_;
    return r;
}

std::vector<double> Environment::full_state() const
{
    std::vector<double> s;
    s.reserve(observations_.size() * kObsDim);
    for (const auto& o : observations_)
        s.insert(s.end(), o.normalized.begin(), o.normalized.end());
    return s;
}

}  // namespace cfmec::env
