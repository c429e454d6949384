#include <doctest.h>

#include <cmath>

#include "cfmec/env.hpp"
#include "cfmec/metrics.hpp"
#include "oracles.hpp"

using namespace cfmec;
using namespace cfmec::env;

namespace {

SystemConfig desk(int users = 5)
{
    SystemConfig cfg;
    cfg.geometry.num_aps = 40;
    cfg.geometry.num_users = users;
    return cfg;
}

compute::UserOutcome user(double energy_j, bool met)
{
    compute::UserOutcome u;
    u.e_total_j = energy_j;
    u.deadline_met = met;
    return u;
}

}  // namespace

TEST_CASE("cooperative reward")
{
    compute::StepOutcome all_met;
    all_met.users = {user(1.5e-3, true), user(0.5e-3, true)};
    CHECK(cooperative_reward(all_met) == doctest::Approx(-2.0));

    compute::StepOutcome one_miss;
    one_miss.users = {user(1e-3, false), user(0.4e-3, true), user(0.6e-3, true)};
    CHECK(cooperative_reward(one_miss) == doctest::Approx(-11.0));

    SUBCASE("flipping a user to missed lowers the reward")
    {
        compute::StepOutcome a;
        a.users = {user(2e-4, true), user(3e-4, true)};
        auto b = a;
        b.users[1].deadline_met = false;
        CHECK(cooperative_reward(b) < cooperative_reward(a));
    }
}

TEST_CASE("action clipping")
{
    CHECK(clip({-0.3, 1.7}).alpha == 0.0);
    CHECK(clip({-0.3, 1.7}).eta == 1.0);
    CHECK(clip({0.25, 0.5}).alpha == 0.25);
    CHECK(clip({NAN, 0.5}).alpha == 0.0);
}

TEST_CASE("reset")
{
    const auto cfg = desk();
    Environment e(cfg, phy::generate_scenario(cfg, 1));
    const auto obs = e.reset(42);
    REQUIRE(obs.size() == 5);
    for (const auto& o : obs) {
        CHECK(o.prev_rate_bps == 0.0);
        CHECK(o.task_bits >= 2500);
        CHECK(o.task_bits <= 7500);
        CHECK(o.deadline_s == 1e-3);
        CHECK(o.normalized[0] == doctest::Approx(o.task_bits / 7500));
        CHECK(o.normalized[1] == 1.0);
        CHECK(o.normalized[2] == 0.0);
    }
    const auto first = obs;
    const auto again = e.reset(42);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(again[k].task_bits == first[k].task_bits);
    CHECK(e.reset(43)[0].task_bits != first[0].task_bits);
}

TEST_CASE("episode framing")
{
    const auto cfg = desk(2);
    Environment e(cfg, phy::generate_scenario(cfg, 1));
    std::vector<Action> joint(2, Action{0.0, 0.5});
    CHECK_THROWS_AS(e.step(joint), std::logic_error);
    e.reset(1);

    const auto s = e.full_state();
    REQUIRE(s.size() == 6);
    CHECK(s[3] == e.observations()[1].normalized[0]);
    CHECK(s[5] == e.observations()[1].normalized[2]);
    CHECK(e.full_state() == s);

    EpisodeAccumulator acc;
    for (int t = 0; t < 100; ++t) {
        CHECK_FALSE(e.done());
        const auto r = e.step(joint);
        acc.add(r.outcome);
        CHECK(r.done == (t == 99));
        REQUIRE(r.rewards.size() == 2);
        CHECK(r.rewards[0] == r.rewards[1]);
        CHECK(r.rewards[0] == r.outcome.reward);
        CHECK(r.rewards[0] <= 0.0);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(r.observations[k].prev_rate_bps == r.outcome.users[k].rate_bps);
            for (double v : r.observations[k].normalized) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
    CHECK(e.done());
    CHECK(acc.opportunities() == 200);
    CHECK_THROWS_AS(e.step(joint), std::logic_error);
}

TEST_CASE("zero action on a single user")
{
    const auto cfg = desk(1);
    Environment e(cfg, phy::generate_scenario(cfg, 3));
    e.reset(5);
    const std::vector<Action> idle{{0.0, 0.0}};
    const auto r = e.step(idle);
    CHECK_FALSE(r.outcome.users[0].deadline_met);
    CHECK(r.outcome.users[0].e_total_j == 0.0);
    CHECK(r.rewards[0] == 0.0);
}

TEST_CASE("joint evaluation matches the per-user formulas")
{
    const auto cfg = desk(4);
    const auto scenario = phy::generate_scenario(cfg, 7);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1), T(2500, 7500);
    for (int trial = 0; trial < 100; ++trial) {
        Rng crng(trial);
        const auto ch = phy::draw_channels(scenario, cfg.radio, crng);
        std::vector<double> tasks(4);
        std::vector<Action> joint(4);
        std::vector<double> p(4);
        for (int k = 0; k < 4; ++k) {
            tasks[k] = T(rng);
            joint[k] = {u(rng) < 0.3 ? 0.0 : u(rng), u(rng)};
            p[k] = joint[k].eta * 0.1;
        }
        const auto out = evaluate_joint_action(cfg, scenario, ch, tasks, joint);

        oracle::CMat g(40), gh(40);
        for (int m = 0; m < 40; ++m)
            for (int k = 0; k < 4; ++k) {
                g[m].push_back(ch.g(m, k));
                gh[m].push_back(ch.g_hat(m, k));
            }
        std::vector<double> local_bits(4), off_bits(4);
        std::vector<oracle::Local> loc(4);
        double total_off = 0;
        for (int k = 0; k < 4; ++k) {
            loc[k] = oracle::local(tasks[k], joint[k].alpha, 1e9, 1e-3, 500, 1e-27);
            off_bits[k] = tasks[k] - loc[k].bits;
            total_off += off_bits[k];
        }
        std::vector<double> energy(4);
        std::vector<bool> met(4);
        for (int k = 0; k < 4; ++k) {
            const double gamma = oracle::sinr(k, p, g, gh, scenario.clusters[k], cfg.radio.noise_power_w());
            const double R = 5e6 * std::log2(1 + gamma);
            const double f = total_off > 0 ? 100e9 * off_bits[k] / total_off : 0.0;
            const auto off = oracle::offload(off_bits[k], R, f, p[k], 500, 1e-3);
            energy[k] = loc[k].e + off.e;
            met[k] = std::max(loc[k].t, off.t) <= 1e-3;
            CHECK(oracle::rel_err(out.users[k].rate_bps, R) <= 1e-10);
            CHECK(oracle::rel_err(out.users[k].e_total_j, energy[k]) <= 1e-10);
            CHECK(out.users[k].deadline_met == met[k]);
        }
        CHECK(oracle::rel_err(out.reward, oracle::reward(energy, met)) <= 1e-10);
    }
}

TEST_CASE("interference coupling through the environment")
{
    const auto cfg = desk(3);
    const auto scenario = phy::generate_scenario(cfg, 2);
    Rng crng(4);
    const auto ch = phy::draw_channels(scenario, cfg.radio, crng);
    const std::vector<double> tasks{5000, 5000, 5000};
    std::vector<Action> joint{{0, 0.2}, {0, 0.2}, {0, 0.2}};
    const auto base = evaluate_joint_action(cfg, scenario, ch, tasks, joint);
    joint[0].eta = 0.9;
    const auto louder = evaluate_joint_action(cfg, scenario, ch, tasks, joint);
    CHECK(louder.users[1].rate_bps <= base.users[1].rate_bps);
    CHECK(louder.users[2].rate_bps <= base.users[2].rate_bps);
}

TEST_CASE("environment rejects mismatched inputs")
{
    const auto cfg = desk(3);
    const auto scenario = phy::generate_scenario(cfg, 2);
    CHECK_THROWS_AS(Environment(desk(4), scenario), std::invalid_argument);
    Environment e(cfg, scenario);
    e.reset(1);
    const std::vector<Action> two(2);
    CHECK_THROWS_AS(e.step(two), std::invalid_argument);
}
