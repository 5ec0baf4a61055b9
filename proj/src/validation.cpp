#include "dynplan/validation.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "dynplan/forward_models.hpp"
#include "dynplan/planner.hpp"

namespace dynplan {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

CheckResult check_spawn_rate(const WorldConfig& cfg, int steps, std::uint64_t seed) {
    WorldConfig c = cfg;
    c.warmup_steps = 0;
    WorldState s = new_episode(c, seed);
    for (int i = 0; i < steps; ++i) {
        world_step(s);
    }
    const double expected = c.spawn_rate();
    const double measured = static_cast<double>(s.spawn_stats.drawn) / static_cast<double>(s.spawn_stats.lane_steps);
    CheckResult r;
    r.name = "spawn_rate";
    r.measured = measured;
    r.threshold = 0.02;
    r.pass = expected > 0.0 ? std::abs(measured - expected) <= 0.02 * expected : measured == 0.0;
    std::ostringstream ss;
    ss << "per-lane rate " << measured << " vs " << expected << " over " << s.spawn_stats.lane_steps << " lane-steps";
    r.detail = ss.str();
    return r;
}

CheckResult check_goal_speed(const WorldConfig& cfg, int steps, std::uint64_t seed) {
    WorldConfig c = cfg;
    c.level = 0.0;
    WorldState s = new_episode(c, seed);
    double worst = 0.0;
    bool contained = true;
    for (int i = 0; i < steps; ++i) {
        world_step(s);
        worst = std::max(worst, std::abs(std::hypot(s.goal.vel.x, s.goal.vel.y) - c.goal_speed));
        const Pixel o = to_pixel(s.goal.pos);
        contained = contained && o.x >= 0 && o.y >= 0 && o.x + c.goal_size <= c.grid_w && o.y + c.goal_size <= c.grid_h;
    }
    CheckResult r;
    r.name = "goal_speed";
    r.measured = worst;
    r.threshold = 1e-9;
    r.pass = worst <= 1e-9 && contained;
    r.detail = contained ? "footprint stayed on the grid" : "footprint left the grid";
    return r;
}

CheckResult check_goal_angles(const WorldConfig& cfg, int episodes, std::uint64_t master_seed) {
    std::array<int, 8> bins{};
    for (int i = 0; i < episodes; ++i) {
        const WorldState s = new_episode(cfg, episode_seed(master_seed, static_cast<std::uint64_t>(i)));
        double a = std::atan2(s.goal.vel.y, s.goal.vel.x);
        if (a < 0.0) {
            a += 2.0 * kPi;
        }
        const int b = std::min(7, static_cast<int>(a / (2.0 * kPi) * 8.0));
        ++bins[static_cast<std::size_t>(b)];
    }
    const double expected = episodes / 8.0;
    double chi2 = 0.0;
    for (int n : bins) {
        chi2 += (n - expected) * (n - expected) / expected;
    }
    CheckResult r;
    r.name = "goal_angle_uniformity";
    r.measured = chi2;
    r.threshold = kChiSquare7DofAlpha001;
    r.pass = chi2 < kChiSquare7DofAlpha001;
    std::ostringstream ss;
    ss << "chi2 over 8 bins, " << episodes << " episodes";
    r.detail = ss.str();
    return r;
}

CheckResult check_visit_conservation(const WorldConfig& cfg, int searches, std::uint64_t master_seed) {
    Rng rng(derive_seed(master_seed, 0xC0FFEE));
    int violations = 0;
    for (int i = 0; i < searches; ++i) {
        const WorldState s = new_episode(cfg, episode_seed(master_seed, static_cast<std::uint64_t>(i)));
        MCTSConfig m;
        m.rollout_length = 1 + static_cast<int>(rng.below(10));
        m.n_rollouts = 1 + static_cast<int>(rng.below(200));
        const auto rollout = oracle_predict(s, m.rollout_length);
        const auto res = plan(s.agent.pos, rollout, m, {cfg.agent_speed, cfg.grid_w, cfg.grid_h}, rng);
        int total = 0;
        for (int n : res.root_visits) {
            total += n;
        }
        violations += total == m.n_rollouts ? 0 : 1;
    }
    CheckResult r;
    r.name = "visit_conservation";
    r.measured = violations;
    r.threshold = 0;
    r.pass = violations == 0;
    r.detail = std::to_string(searches) + " searches";
    return r;
}

std::vector<CheckResult> run_validation_suite(const WorldConfig& cfg, std::uint64_t master_seed) {
    return {
        check_spawn_rate(cfg, 100000, master_seed),
        check_goal_speed(cfg, 10000, master_seed),
        check_goal_angles(cfg, 1000, master_seed),
        check_visit_conservation(cfg, 1000, master_seed),
    };
}

}  // namespace dynplan
