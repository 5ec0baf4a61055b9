#pragma once

// PUCT tree search over the 8 heading actions against one shared
// PredictedRollout. Tree depth is bounded by the rollout length, so there is
// no separate playout policy; leaves that neither reach the goal nor collide
// are worth 0 unless distance shaping is enabled.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynplan/env.hpp"
#include "dynplan/forward_models.hpp"
#include "dynplan/rng.hpp"

namespace dynplan {

struct MCTSConfig {
    int n_rollouts = 100;
    int rollout_length = 3;
    double temperature = 0.01;
    double c_puct = 1.4;
    double prior_kappa = 2.0;
    double death_value = -20.0;
    double goal_value = 20.0;
    double shaping_beta = 0.0;

    friend bool operator==(const MCTSConfig&, const MCTSConfig&) = default;
};

void validate(const MCTSConfig& cfg);

using ActionArray = std::array<double, kNumActions>;

// P(a) proportional to exp(kappa * cos(theta_a - theta_goal)); uniform when the
// goal is unknown or coincides with the agent.
ActionArray goal_prior(Vec2 agent, std::optional<Vec2> goal, double kappa);

enum class EdgeResult : std::uint8_t { Unknown, Safe, Goal, Death };

struct SearchNode {
    int depth = 0;
    Vec2 agent_pos;
    std::array<int, kNumActions> visits{};
    ActionArray value_sum{};
    ActionArray prior{};
    std::array<int, kNumActions> child{-1, -1, -1, -1, -1, -1, -1, -1};
    std::array<EdgeResult, kNumActions> result{};

    double q(int a) const {
        const auto i = static_cast<std::size_t>(a);
        return visits[i] == 0 ? 0.0 : value_sum[i] / visits[i];
    }
    int total_visits() const;
};

// argmax_a Q(a) + c_puct * P(a) * sqrt(sum_b N(b)) / (1 + N(a)); lowest index on ties.
// sum_b N(b) is floored at 1 so a fresh node follows its prior.
int puct_select(const SearchNode& node, double c_puct);

struct PathEdge {
    int node = 0;
    int action = 0;
};

class SearchTree {
public:
    explicit SearchTree(SearchNode root) { nodes_.push_back(std::move(root)); }

    SearchNode& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }
    const SearchNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const SearchNode& root() const { return nodes_.front(); }
    int add(SearchNode n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }
    std::size_t size() const { return nodes_.size(); }

    // N(a) += 1 and W(a) += value for every edge on the path.
    void backup(const std::vector<PathEdge>& path, double value);

private:
    std::vector<SearchNode> nodes_;
};

struct Kinematics {
    double agent_speed = 1.0;
    int grid_w = 48;
    int grid_h = 48;
};

struct PlanResult {
    int action = 0;
    std::array<int, kNumActions> root_visits{};
    ActionArray root_q{};
    std::size_t tree_size = 0;
};

// Runs cfg.n_rollouts select/expand/evaluate/backup iterations. Moving from
// depth d to d+1 is checked against rollout.steps[d] (the frame at t+d+1).
PlanResult plan(Vec2 agent_pos, const PredictedRollout& rollout, const MCTSConfig& cfg, const Kinematics& kin,
                Rng& rng);

inline int plan_action(Vec2 agent_pos, const PredictedRollout& rollout, const MCTSConfig& cfg,
                       const Kinematics& kin, Rng& rng) {
    return plan(agent_pos, rollout, cfg, kin, rng).action;
}

// Samples from pi(a) proportional to N(a)^(1/temperature), then maps the draw
// to the lowest action with the same visit count.
int select_by_visits(const std::array<int, kNumActions>& visits, double temperature, Rng& rng);

}  // namespace dynplan
