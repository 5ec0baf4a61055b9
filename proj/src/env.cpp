#include "dynplan/env.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "dynplan/errors.hpp"

namespace dynplan {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kPlacementRetries = 4096;

bool fully_exited(const Obstacle& ob, int grid_w) {
    if (ob.speed >= 0.0) {
        return ob.tail_col() >= grid_w;
    }
    return ob.head_col() < 0;
}

Obstacle sample_obstacle(const WorldConfig& config, const Lane& lane, int lane_index, Rng& rng) {
    const ObstacleClass& cls = config.obstacle_classes[static_cast<std::size_t>(lane.class_id - 1)];
    const double length_draw = cls.mean_length + rng.uniform(-cls.length_jitter, cls.length_jitter);
    const double speed = cls.mean_speed + rng.uniform(-cls.speed_jitter, cls.speed_jitter);
    Obstacle ob;
    ob.lane_index = lane_index;
    ob.length = std::max(1, round_px(length_draw));
    if (lane.direction == Direction::LeftToRight) {
        ob.head_x = -1.0;
        ob.speed = speed;
    } else {
        ob.head_x = static_cast<double>(config.grid_w + ob.length - 1);
        ob.speed = -speed;
    }
    return ob;
}

bool overlaps_lane(const std::vector<Obstacle>& obstacles, const Obstacle& candidate) {
    for (const auto& ob : obstacles) {
        if (ob.lane_index != candidate.lane_index) {
            continue;
        }
        if (candidate.tail_col() <= ob.head_col() && ob.tail_col() <= candidate.head_col()) {
            return true;
        }
    }
    return false;
}

}  // namespace

int round_px(double v) { return static_cast<int>(std::lround(v)); }

Pixel to_pixel(Vec2 p) { return {round_px(p.x), round_px(p.y)}; }

std::vector<ObstacleClass> default_obstacle_classes() {
    return {
        {1, 0.5, 0.1, 1.0, 0.0},
        {2, 0.5, 0.1, 2.0, 1.0},
        {3, 1.0, 0.2, 3.0, 1.0},
        {4, 1.0, 0.2, 4.0, 1.0},
        {5, 1.5, 0.3, 6.0, 2.0},
    };
}

std::vector<int> default_lane_rows(int grid_h) {
    std::vector<int> rows;
    for (int r = 2; r <= grid_h - 3; r += 2) {
        rows.push_back(r);
    }
    return rows;
}

WorldConfig& WorldConfig::with_speed(AgentSpeed speed) {
    if (speed == AgentSpeed::k1x) {
        agent_speed = 0.5;
        max_steps = 407;
    } else {
        agent_speed = 1.0;
        max_steps = 203;
    }
    return *this;
}

void validate(const WorldConfig& c) {
    auto fail = [](const std::string& what) { throw ConfigError("invalid world config: " + what); };
    if (c.grid_h <= 0) fail("grid_h must be > 0");
    if (c.grid_w <= 0) fail("grid_w must be > 0");
    if (c.goal_size < 1) fail("goal_size must be >= 1");
    if (c.goal_size > c.grid_w || c.goal_size > c.grid_h) fail("goal_size exceeds the grid");
    if (!(c.agent_speed > 0.0)) fail("agent_speed must be > 0");
    if (c.max_steps <= 0) fail("max_steps must be > 0");
    if (!(c.level >= 0.0)) fail("level must be >= 0");
    if (!(c.spawn_base_rate >= 0.0)) fail("spawn_base_rate must be >= 0");
    if (!(c.goal_speed >= 0.0)) fail("goal_speed must be >= 0");
    if (c.warmup_steps < 0) fail("warmup_steps must be >= 0");
    std::set<int> seen;
    for (int row : c.lane_rows) {
        if (row < 0 || row >= c.grid_h) fail("lane row " + std::to_string(row) + " outside the grid");
        if (!seen.insert(row).second) fail("lane row " + std::to_string(row) + " repeated");
    }
    if (c.obstacle_classes.empty()) fail("obstacle_classes is empty");
    for (std::size_t i = 0; i < c.obstacle_classes.size(); ++i) {
        const auto& cls = c.obstacle_classes[i];
        const std::string name = "class " + std::to_string(i + 1);
        if (cls.class_id != static_cast<int>(i) + 1) fail(name + " has class_id out of order");
        if (cls.class_id > kNumObstacleClasses) fail(name + " exceeds the palette");
        if (!(cls.mean_speed > 0.0)) fail(name + " mean_speed must be > 0");
        if (!(cls.speed_jitter >= 0.0 && cls.speed_jitter < cls.mean_speed)) {
            fail(name + " speed_jitter must be in [0, mean_speed)");
        }
        if (!(cls.mean_length >= 1.0)) fail(name + " mean_length must be >= 1");
        if (!(cls.length_jitter >= 0.0)) fail(name + " length_jitter must be >= 0");
    }
}

std::string_view to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Running: return "running";
        case OutcomeKind::GoalReached: return "goal";
        case OutcomeKind::Died: return "died";
        case OutcomeKind::TimedOut: return "timeout";
    }
    return "running";
}

OutcomeKind outcome_from_string(std::string_view text) {
    if (text == "running") return OutcomeKind::Running;
    if (text == "goal") return OutcomeKind::GoalReached;
    if (text == "died") return OutcomeKind::Died;
    if (text == "timeout") return OutcomeKind::TimedOut;
    throw std::invalid_argument("unknown outcome '" + std::string(text) + "'");
}

void reflect_into_bounds(Vec2& pos, Vec2& vel, double max_x, double max_y) {
    auto reflect_axis = [](double& p, double& v, double hi) {
        // Loop handles speeds larger than the span; one pass in practice.
        for (int guard = 0; guard < 64 && (p < 0.0 || p > hi); ++guard) {
            if (p > hi) {
                p = 2.0 * hi - p;
                v = -v;
            } else if (p < 0.0) {
                p = -p;
                v = -v;
            }
        }
        p = std::clamp(p, 0.0, hi);
    };
    reflect_axis(pos.x, vel.x, max_x);
    reflect_axis(pos.y, vel.y, max_y);
}

Vec2 goal_center(const GoalState& goal, int goal_size) {
    const double half = 0.5 * (goal_size - 1);
    return {goal.pos.x + half, goal.pos.y + half};
}

Pixel goal_footprint_origin(Vec2 center, int goal_size) {
    const double half = 0.5 * (goal_size - 1);
    return {round_px(center.x - half), round_px(center.y - half)};
}

bool footprint_contains(Pixel origin, int size, Pixel p) {
    return p.x >= origin.x && p.x < origin.x + size && p.y >= origin.y && p.y < origin.y + size;
}

bool obstacle_at(const WorldState& state, Pixel p) {
    for (const auto& ob : state.obstacles) {
        if (state.lanes[static_cast<std::size_t>(ob.lane_index)].row != p.y) {
            continue;
        }
        if (p.x >= ob.tail_col() && p.x <= ob.head_col()) {
            return true;
        }
    }
    return false;
}

WorldState new_episode(const WorldConfig& config, std::uint64_t seed) {
    validate(config);
    WorldState state;
    state.config = config;

    Rng lane_rng(derive_seed(seed, stream::kLanes));
    const auto n_classes = static_cast<std::uint64_t>(config.obstacle_classes.size());
    state.lanes.reserve(config.lane_rows.size());
    for (int row : config.lane_rows) {
        Lane lane;
        lane.row = row;
        lane.class_id = static_cast<int>(lane_rng.below(n_classes)) + 1;
        lane.direction = lane_rng.below(2) == 0 ? Direction::LeftToRight : Direction::RightToLeft;
        state.lanes.push_back(lane);
    }
    state.spawn_rng = Rng(derive_seed(seed, stream::kSpawn));
    state.obstacle_rng = Rng(derive_seed(seed, stream::kObstacle));

    Rng place(derive_seed(seed, stream::kPlacement));
    const double max_gx = config.grid_w - config.goal_size;
    const double max_gy = config.grid_h - config.goal_size;
    state.goal.pos = {place.uniform(0.0, max_gx), place.uniform(0.0, max_gy)};
    const double angle = place.uniform(0.0, 2.0 * kPi);
    state.goal.vel = {config.goal_speed * std::cos(angle), config.goal_speed * std::sin(angle)};

    for (int i = 0; i < config.warmup_steps; ++i) {
        world_step(state);
    }
    state.t = 0;

    const Pixel goal_origin = to_pixel(state.goal.pos);
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
        const Pixel p{static_cast<int>(place.below(static_cast<std::uint64_t>(config.grid_w))),
                      static_cast<int>(place.below(static_cast<std::uint64_t>(config.grid_h)))};
        if (footprint_contains(goal_origin, config.goal_size, p) || obstacle_at(state, p)) {
            continue;
        }
        state.agent.pos = {static_cast<double>(p.x), static_cast<double>(p.y)};
        placed = true;
    }
    if (!placed) {
        throw PlacementError("no free cell for the agent after " + std::to_string(kPlacementRetries) +
                             " attempts");
    }
    return state;
}

void world_step(WorldState& state) {
    const WorldConfig& config = state.config;
    for (auto& ob : state.obstacles) {
        ob.head_x += ob.speed;
    }
    std::erase_if(state.obstacles, [&](const Obstacle& ob) { return fully_exited(ob, config.grid_w); });

    const double rate = config.spawn_rate();
    for (std::size_t li = 0; li < state.lanes.size(); ++li) {
        const int n = state.spawn_rng.poisson(rate);
        ++state.spawn_stats.lane_steps;
        state.spawn_stats.drawn += static_cast<std::uint64_t>(n);
        for (int k = 0; k < n; ++k) {
            Obstacle ob = sample_obstacle(config, state.lanes[li], static_cast<int>(li), state.obstacle_rng);
            if (overlaps_lane(state.obstacles, ob)) {
                continue;
            }
            state.obstacles.push_back(ob);
            ++state.spawn_stats.accepted;
        }
    }

    state.goal.pos.x += state.goal.vel.x;
    state.goal.pos.y += state.goal.vel.y;
    reflect_into_bounds(state.goal.pos, state.goal.vel, config.grid_w - config.goal_size,
                        config.grid_h - config.goal_size);
    ++state.t;
}

Vec2 action_to_velocity(int action, double speed) {
    if (action < 0 || action >= kNumActions) {
        throw std::invalid_argument("action " + std::to_string(action) + " outside 0..7");
    }
    // Exact values on the axes and diagonals keep agent positions reproducible.
    static constexpr double kDiag = 0.70710678118654752440;
    static constexpr double kCos[kNumActions] = {1.0, kDiag, 0.0, -kDiag, -1.0, -kDiag, 0.0, kDiag};
    static constexpr double kSin[kNumActions] = {0.0, kDiag, 1.0, kDiag, 0.0, -kDiag, -1.0, -kDiag};
    return {speed * kCos[action], speed * kSin[action]};
}

Outcome agent_step(WorldState& state, int action) {
    if (state.outcome.finished()) {
        throw StateError("agent_step on a finished episode");
    }
    const Vec2 v = action_to_velocity(action, state.config.agent_speed);
    world_step(state);

    const WorldConfig& config = state.config;
    auto& pos = state.agent.pos;
    pos.x = std::clamp(pos.x + v.x, 0.0, static_cast<double>(config.grid_w - 1));
    pos.y = std::clamp(pos.y + v.y, 0.0, static_cast<double>(config.grid_h - 1));
    const Pixel p = to_pixel(pos);

    Outcome out;
    out.steps_taken = state.t;
    if (footprint_contains(to_pixel(state.goal.pos), config.goal_size, p)) {
        out.kind = OutcomeKind::GoalReached;
        out.reward = kGoalReward;
    } else if (obstacle_at(state, p)) {
        out.kind = OutcomeKind::Died;
        out.reward = kDeathReward;
        state.agent.alive = false;
    } else if (state.t >= config.max_steps) {
        out.kind = OutcomeKind::TimedOut;
    }
    state.outcome = out;
    return out;
}

Frame render_frame(const WorldState& state) {
    const WorldConfig& config = state.config;
    Frame frame(config.grid_h, config.grid_w);
    for (const auto& ob : state.obstacles) {
        const Lane& lane = state.lanes[static_cast<std::size_t>(ob.lane_index)];
        const int lo = std::max(ob.tail_col(), 0);
        const int hi = std::min(ob.head_col(), config.grid_w - 1);
        for (int x = lo; x <= hi; ++x) {
            frame.at(x, lane.row) = static_cast<std::uint8_t>(lane.class_id);
        }
    }
    const Pixel g = to_pixel(state.goal.pos);
    for (int dy = 0; dy < config.goal_size; ++dy) {
        for (int dx = 0; dx < config.goal_size; ++dx) {
            frame.at(g.x + dx, g.y + dy) = kGoalCell;
        }
    }
    return frame;
}

}  // namespace dynplan
