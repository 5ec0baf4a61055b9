#pragma once

#include "dynplan/env.hpp"

namespace dynplan::testing {

// Default-sized world with no traffic and no warm-up; goal and agent placed explicitly.
inline WorldState empty_world(WorldConfig cfg = {}, Vec2 goal_pos = {3.0, 5.0}, Vec2 goal_vel = {0.0, 0.0},
                              Vec2 agent_pos = {40.0, 40.0}) {
    cfg.level = 0.0;
    cfg.warmup_steps = 0;
    WorldState s = new_episode(cfg, 1);
    s.obstacles.clear();
    s.goal.pos = goal_pos;
    s.goal.vel = goal_vel;
    s.agent.pos = agent_pos;
    return s;
}

inline int lane_with_row(const WorldState& s, int row) {
    for (std::size_t i = 0; i < s.lanes.size(); ++i) {
        if (s.lanes[i].row == row) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

inline void add_obstacle(WorldState& s, int row, double head_x, int length, double speed, int class_id = 1) {
    const int li = lane_with_row(s, row);
    s.lanes[static_cast<std::size_t>(li)].class_id = class_id;
    s.obstacles.push_back({li, head_x, length, speed});
}

}  // namespace dynplan::testing
