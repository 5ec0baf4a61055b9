#pragma once

// Dynamic navigation world: horizontal obstacle lanes with Poisson arrivals,
// a reflecting 2x2 goal and a 1x1 agent with 8 heading actions. World
// dynamics never depend on the agent, so a cloned state replays the exact
// future frame sequence.

#include <cstdint>
#include <string_view>
#include <vector>

#include "dynplan/frame.hpp"
#include "dynplan/rng.hpp"

namespace dynplan {

inline constexpr int kNumActions = 8;
inline constexpr int kGoalReward = 20;
inline constexpr int kDeathReward = -20;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Round half away from zero; the single quantization rule of the world.
int round_px(double v);
Pixel to_pixel(Vec2 p);

struct ObstacleClass {
    int class_id = 1;
    double mean_speed = 1.0;
    double speed_jitter = 0.0;    // uniform half-width
    double mean_length = 1.0;
    double length_jitter = 0.0;   // uniform half-width, result rounded, >= 1
    friend bool operator==(const ObstacleClass&, const ObstacleClass&) = default;
};

std::vector<ObstacleClass> default_obstacle_classes();
// Every other row from 2 to 44 inclusive (22 lanes) on a 48-row grid.
std::vector<int> default_lane_rows(int grid_h);

enum class AgentSpeed { k1x, k2x };

struct WorldConfig {
    int grid_h = 48;
    int grid_w = 48;
    double level = 6.0;
    double spawn_base_rate = 0.01;
    std::vector<int> lane_rows = default_lane_rows(48);
    std::vector<ObstacleClass> obstacle_classes = default_obstacle_classes();
    double goal_speed = 0.5;
    int goal_size = 2;
    double agent_speed = 1.0;
    int max_steps = 203;
    int warmup_steps = 48;
    std::uint64_t master_seed = 0;

    // Per-lane per-step Poisson rate.
    double spawn_rate() const { return level * spawn_base_rate; }

    // Sets agent_speed and max_steps to the 1x (0.5, 407) or 2x (1.0, 203) agent.
    WorldConfig& with_speed(AgentSpeed speed);

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

// Throws ConfigError naming the first violated constraint.
void validate(const WorldConfig& config);

enum class Direction : std::uint8_t { LeftToRight, RightToLeft };

struct Lane {
    int row = 0;
    int class_id = 1;
    Direction direction = Direction::LeftToRight;
    friend bool operator==(const Lane&, const Lane&) = default;
};

// Body occupies columns round(head_x) - i for i in [0, length).
struct Obstacle {
    int lane_index = 0;
    double head_x = 0.0;
    int length = 1;
    double speed = 0.0;  // signed; positive moves left to right

    int head_col() const { return round_px(head_x); }
    int tail_col() const { return head_col() - (length - 1); }
    friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

// pos is the top-left corner of the goal_size x goal_size footprint.
struct GoalState {
    Vec2 pos;
    Vec2 vel;
    friend bool operator==(const GoalState&, const GoalState&) = default;
};

struct AgentState {
    Vec2 pos;
    bool alive = true;
    friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class OutcomeKind { Running, GoalReached, Died, TimedOut };

std::string_view to_string(OutcomeKind kind);
OutcomeKind outcome_from_string(std::string_view text);

struct Outcome {
    OutcomeKind kind = OutcomeKind::Running;
    int reward = 0;
    int steps_taken = 0;
    bool finished() const { return kind != OutcomeKind::Running; }
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Counters for the spawn process; `drawn` is before overlap rejection.
struct SpawnStats {
    std::uint64_t lane_steps = 0;
    std::uint64_t drawn = 0;
    std::uint64_t accepted = 0;
    friend bool operator==(const SpawnStats&, const SpawnStats&) = default;
};

struct WorldState {
    WorldConfig config;
    int t = 0;
    std::vector<Lane> lanes;
    std::vector<Obstacle> obstacles;
    GoalState goal;
    AgentState agent;
    Rng spawn_rng;
    Rng obstacle_rng;
    Outcome outcome;
    SpawnStats spawn_stats;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Reflects a footprint's top-left position into [0, max_x] x [0, max_y],
// mirroring any overshoot and flipping the matching velocity component.
void reflect_into_bounds(Vec2& pos, Vec2& vel, double max_x, double max_y);

// Center of the goal footprint in pixel coordinates (mean of its pixel centers).
Vec2 goal_center(const GoalState& goal, int goal_size);

// Top-left pixel of a goal footprint whose pixel-center mean is `center`.
Pixel goal_footprint_origin(Vec2 center, int goal_size);
bool footprint_contains(Pixel origin, int size, Pixel p);

bool obstacle_at(const WorldState& state, Pixel p);

WorldState new_episode(const WorldConfig& config, std::uint64_t episode_seed);

// Advances the world one step: obstacles move, exited ones are removed,
// lanes spawn, goal moves, t increments. The agent is not touched.
void world_step(WorldState& state);

// dx = speed*cos(action*45deg), dy = speed*sin(action*45deg).
Vec2 action_to_velocity(int action, double speed);

// World step, then agent move (clamped), then goal/obstacle/timeout check.
Outcome agent_step(WorldState& state, int action);

Frame render_frame(const WorldState& state);

inline WorldState clone_state(const WorldState& state) { return state; }

}  // namespace dynplan
