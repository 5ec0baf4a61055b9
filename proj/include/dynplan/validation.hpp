#pragma once

// Statistical self-checks of the simulator and planner, run by `dynplan validate`.

#include <cstdint>
#include <string>
#include <vector>

#include "dynplan/env.hpp"

namespace dynplan {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

// Mean Poisson draws per lane-step vs level * spawn_base_rate; pass within 2%.
CheckResult check_spawn_rate(const WorldConfig& cfg, int steps, std::uint64_t seed);
// Max | |goal.vel| - goal_speed | over `steps` steps; also fails if the footprint leaves the grid.
CheckResult check_goal_speed(const WorldConfig& cfg, int steps, std::uint64_t seed);
// Chi-square statistic of initial goal heading over 8 bins; alpha = 0.01, 7 dof.
CheckResult check_goal_angles(const WorldConfig& cfg, int episodes, std::uint64_t master_seed);
// Sum of root visits equals n_rollouts on random searches.
CheckResult check_visit_conservation(const WorldConfig& cfg, int searches, std::uint64_t master_seed);

std::vector<CheckResult> run_validation_suite(const WorldConfig& cfg, std::uint64_t master_seed);

inline constexpr double kChiSquare7DofAlpha001 = 18.475306906582357;

}  // namespace dynplan
