#include "dynplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynplan/errors.hpp"

namespace dynplan {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Move {
    Vec2 pos;
    EdgeResult result = EdgeResult::Safe;
};

Move simulate_move(const SearchNode& node, int action, const PredictedFrame& frame, int goal_size,
                   const Kinematics& kin) {
    const Vec2 v = action_to_velocity(action, kin.agent_speed);
    Move m;
    m.pos.x = std::clamp(node.agent_pos.x + v.x, 0.0, static_cast<double>(kin.grid_w - 1));
    m.pos.y = std::clamp(node.agent_pos.y + v.y, 0.0, static_cast<double>(kin.grid_h - 1));
    const Pixel p = to_pixel(m.pos);
    if (frame.goal_estimate && footprint_contains(goal_footprint_origin(*frame.goal_estimate, goal_size), goal_size, p)) {
        m.result = EdgeResult::Goal;
    } else if (frame.occupied(p)) {
        m.result = EdgeResult::Death;
    }
    return m;
}

double leaf_value(Vec2 pos, const PredictedFrame& frame, const MCTSConfig& cfg, const Kinematics& kin) {
    if (cfg.shaping_beta == 0.0 || !frame.goal_estimate) {
        return 0.0;
    }
    const double diag = std::hypot(static_cast<double>(kin.grid_w), static_cast<double>(kin.grid_h));
    const double dist = std::hypot(frame.goal_estimate->x - pos.x, frame.goal_estimate->y - pos.y);
    return -cfg.shaping_beta * (dist / diag);
}

}  // namespace

void validate(const MCTSConfig& cfg) {
    auto fail = [](const std::string& what) { throw ConfigError("invalid search config: " + what); };
    if (cfg.n_rollouts < 1) fail("n_rollouts must be >= 1");
    if (cfg.rollout_length < 1) fail("rollout_length must be >= 1");
    if (!(cfg.temperature > 0.0)) fail("temperature must be > 0");
    if (!(cfg.c_puct >= 0.0)) fail("c_puct must be >= 0");
    if (!(cfg.prior_kappa >= 0.0)) fail("prior_kappa must be >= 0");
    if (!(cfg.death_value <= cfg.goal_value)) fail("death_value must not exceed goal_value");
    if (!(cfg.shaping_beta >= 0.0)) fail("shaping_beta must be >= 0");
}

ActionArray goal_prior(Vec2 agent, std::optional<Vec2> goal, double kappa) {
    ActionArray p;
    p.fill(1.0 / kNumActions);
    if (!goal) {
        return p;
    }
    const double dx = goal->x - agent.x;
    const double dy = goal->y - agent.y;
    if (dx == 0.0 && dy == 0.0) {
        return p;
    }
    const double theta = std::atan2(dy, dx);
    double total = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        const double w = std::exp(kappa * std::cos(a * kPi / 4.0 - theta));
        p[static_cast<std::size_t>(a)] = w;
        total += w;
    }
    for (double& v : p) {
        v /= total;
    }
    return p;
}

int SearchNode::total_visits() const { return std::accumulate(visits.begin(), visits.end(), 0); }

int puct_select(const SearchNode& node, double c_puct) {
    const double sqrt_total = std::sqrt(static_cast<double>(std::max(node.total_visits(), 1)));
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const double score = node.q(a) + c_puct * node.prior[i] * sqrt_total / (1.0 + node.visits[i]);
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

void SearchTree::backup(const std::vector<PathEdge>& path, double value) {
    for (const auto& edge : path) {
        auto& n = node(edge.node);
        const auto i = static_cast<std::size_t>(edge.action);
        n.visits[i] += 1;
        n.value_sum[i] += value;
    }
}

int select_by_visits(const std::array<int, kNumActions>& visits, double temperature, Rng& rng) {
    const int max_n = *std::max_element(visits.begin(), visits.end());
    if (max_n == 0) {
        return 0;
    }
    // Weights in log space: (1/tau) * (log N - log N_max) <= 0.
    ActionArray w{};
    double total = 0.0;
    for (std::size_t a = 0; a < visits.size(); ++a) {
        if (visits[a] > 0) {
            w[a] = std::exp((std::log(static_cast<double>(visits[a])) - std::log(static_cast<double>(max_n))) /
                            temperature);
            total += w[a];
        }
    }
    double u = rng.uniform() * total;
    int chosen = 0;
    for (std::size_t a = 0; a < visits.size(); ++a) {
        if (w[a] <= 0.0) {
            continue;
        }
        chosen = static_cast<int>(a);
        if (u < w[a]) {
            break;
        }
        u -= w[a];
    }
    for (int a = 0; a < kNumActions; ++a) {
        if (visits[static_cast<std::size_t>(a)] == visits[static_cast<std::size_t>(chosen)]) {
            return a;
        }
    }
    return chosen;
}

PlanResult plan(Vec2 agent_pos, const PredictedRollout& rollout, const MCTSConfig& cfg, const Kinematics& kin,
                Rng& rng) {
    validate(cfg);
    if (rollout.steps.empty()) {
        throw std::invalid_argument("plan: empty predicted rollout");
    }
    const int depth_limit = std::min<int>(cfg.rollout_length, static_cast<int>(rollout.steps.size()));
    const int goal_size = rollout.goal_size;

    SearchNode root;
    root.depth = 0;
    root.agent_pos = agent_pos;
    root.prior = goal_prior(agent_pos, rollout.steps.front().goal_estimate, cfg.prior_kappa);
    SearchTree tree(root);

    std::vector<PathEdge> path;
    path.reserve(static_cast<std::size_t>(depth_limit));
    for (int iter = 0; iter < cfg.n_rollouts; ++iter) {
        path.clear();
        int current = 0;
        double value = 0.0;
        while (true) {
            const int a = puct_select(tree.node(current), cfg.c_puct);
            path.push_back({current, a});
            const int depth = tree.node(current).depth;
            const auto& frame = rollout.steps[static_cast<std::size_t>(depth)];
            const Move m = simulate_move(tree.node(current), a, frame, goal_size, kin);
            const auto ai = static_cast<std::size_t>(a);
            tree.node(current).result[ai] = m.result;
            if (m.result == EdgeResult::Goal) {
                value = cfg.goal_value;
                break;
            }
            if (m.result == EdgeResult::Death) {
                value = cfg.death_value;
                break;
            }
            if (depth + 1 >= depth_limit) {
                value = leaf_value(m.pos, frame, cfg, kin);
                break;
            }
            const int child = tree.node(current).child[ai];
            if (child < 0) {
                SearchNode n;
                n.depth = depth + 1;
                n.agent_pos = m.pos;
                n.prior = goal_prior(m.pos, rollout.steps[static_cast<std::size_t>(depth + 1)].goal_estimate,
                                     cfg.prior_kappa);
                const int id = tree.add(std::move(n));
                tree.node(current).child[ai] = id;
                value = leaf_value(m.pos, frame, cfg, kin);
                break;
            }
            current = child;
        }
        tree.backup(path, value);
    }

    PlanResult result;
    const SearchNode& r = tree.root();
    result.root_visits = r.visits;
    for (int a = 0; a < kNumActions; ++a) {
        result.root_q[static_cast<std::size_t>(a)] = r.q(a);
    }
    result.tree_size = tree.size();
    result.action = select_by_visits(r.visits, cfg.temperature, rng);
    return result;
}

}  // namespace dynplan
