#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "dynplan/env.hpp"
#include "dynplan/errors.hpp"
#include "test_support.hpp"

using namespace dynplan;
using dynplan::testing::add_obstacle;
using dynplan::testing::empty_world;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

WorldConfig two_x() {
    WorldConfig c;
    c.with_speed(AgentSpeed::k2x);
    return c;
}

}  // namespace

TEST(WorldConfig, DefaultsAreValid) {
    WorldConfig c;
    EXPECT_NO_THROW(validate(c));
    EXPECT_EQ(c.lane_rows.size(), 22u);
    EXPECT_EQ(c.lane_rows.front(), 2);
    EXPECT_EQ(c.lane_rows.back(), 44);
    EXPECT_EQ(c.obstacle_classes.size(), 5u);
    EXPECT_DOUBLE_EQ(c.spawn_rate(), 0.06);
}

TEST(WorldConfig, SpeedPresets) {
    WorldConfig c;
    c.with_speed(AgentSpeed::k1x);
    EXPECT_DOUBLE_EQ(c.agent_speed, 0.5);
    EXPECT_EQ(c.max_steps, 407);
    c.with_speed(AgentSpeed::k2x);
    EXPECT_DOUBLE_EQ(c.agent_speed, 1.0);
    EXPECT_EQ(c.max_steps, 203);
}

TEST(WorldConfig, RejectsInvalid) {
    WorldConfig c;
    c.grid_h = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.lane_rows = {2, 2};
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.lane_rows = {48};
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.agent_speed = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.goal_size = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.obstacle_classes[0].mean_length = 0.5;
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_THROW(new_episode(c, 1), ConfigError);
}

TEST(NewEpisode, DeterministicForSeed) {
    const WorldConfig c;
    EXPECT_EQ(new_episode(c, 7), new_episode(c, 7));
    EXPECT_NE(render_frame(new_episode(c, 7)), render_frame(new_episode(c, 8)));
}

TEST(NewEpisode, LevelZeroHasNoObstacles) {
    WorldConfig c;
    c.level = 0.0;
    c.warmup_steps = 0;
    EXPECT_TRUE(new_episode(c, 3).obstacles.empty());
    c.warmup_steps = 48;
    EXPECT_TRUE(new_episode(c, 3).obstacles.empty());
}

TEST(NewEpisode, WarmupPopulatesLanesAndResetsClock) {
    const WorldState s = new_episode(WorldConfig{}, 5);
    EXPECT_EQ(s.t, 0);
    EXPECT_FALSE(s.obstacles.empty());
}

TEST(NewEpisode, PlacementInvariants) {
    const WorldConfig c;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const WorldState s = new_episode(c, seed);
        const Pixel a = to_pixel(s.agent.pos);
        ASSERT_FALSE(obstacle_at(s, a));
        ASSERT_FALSE(footprint_contains(to_pixel(s.goal.pos), c.goal_size, a));
        ASSERT_GE(s.goal.pos.x, 0.0);
        ASSERT_LE(s.goal.pos.x, c.grid_w - c.goal_size);
        ASSERT_GE(s.goal.pos.y, 0.0);
        ASSERT_LE(s.goal.pos.y, c.grid_h - c.goal_size);
        ASSERT_NEAR(std::hypot(s.goal.vel.x, s.goal.vel.y), c.goal_speed, 1e-12);
        ASSERT_EQ(s.lanes.size(), c.lane_rows.size());
        for (const auto& lane : s.lanes) {
            ASSERT_GE(lane.class_id, 1);
            ASSERT_LE(lane.class_id, 5);
        }
    }
}

TEST(NewEpisode, GoalHeadingIsUniform) {
    // Chi-square on 8 equal bins at alpha = 0.01 (7 dof critical value 18.4753).
    const WorldConfig c;
    std::array<int, 8> bins{};
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const WorldState s = new_episode(c, episode_seed(99, i));
        double a = std::atan2(s.goal.vel.y, s.goal.vel.x);
        if (a < 0) a += 2 * kPi;
        ++bins[static_cast<std::size_t>(std::min(7, static_cast<int>(a / (2 * kPi) * 8)))];
    }
    double chi2 = 0.0;
    for (int n : bins) chi2 += (n - 125.0) * (n - 125.0) / 125.0;
    EXPECT_LT(chi2, 18.4753);
}

TEST(WorldStep, ObstacleMovesAtConstantSpeed) {
    WorldState s = empty_world();
    add_obstacle(s, 10, 5.0, 2, 1.0);
    world_step(s);
    ASSERT_EQ(s.obstacles.size(), 1u);
    EXPECT_DOUBLE_EQ(s.obstacles[0].head_x, 6.0);
    EXPECT_EQ(s.t, 1);
}

TEST(WorldStep, GoalReflectsAtRightWall) {
    WorldState s = empty_world(WorldConfig{}, {46.2, 10.0}, {0.5, 0.0});
    world_step(s);
    EXPECT_DOUBLE_EQ(s.goal.vel.x, -0.5);
    EXPECT_DOUBLE_EQ(s.goal.vel.y, 0.0);
    EXPECT_NEAR(s.goal.pos.x, 45.3, 1e-12);
    EXPECT_LE(to_pixel(s.goal.pos).x + 2, 48);
}

TEST(WorldStep, GoalReflectsAtLeftAndTopWalls) {
    WorldState s = empty_world(WorldConfig{}, {0.2, 0.1}, {-0.3, -0.4});
    world_step(s);
    EXPECT_NEAR(s.goal.pos.x, 0.1, 1e-12);
    EXPECT_NEAR(s.goal.pos.y, 0.3, 1e-12);
    EXPECT_DOUBLE_EQ(s.goal.vel.x, 0.3);
    EXPECT_DOUBLE_EQ(s.goal.vel.y, 0.4);
}

TEST(WorldStep, SpawnRateMatchesPoissonMean) {
    // 20 lanes at level 6 and base rate 0.01: 1.2 expected draws per step.
    WorldConfig c;
    c.lane_rows.clear();
    for (int r = 2; r < 42; r += 2) c.lane_rows.push_back(r);
    c.warmup_steps = 0;
    WorldState s = new_episode(c, 2024);
    const int steps = 100000;
    for (int i = 0; i < steps; ++i) world_step(s);
    const double per_step = static_cast<double>(s.spawn_stats.drawn) / steps;
    EXPECT_NEAR(per_step, 1.2, 0.02 * 1.2);
    EXPECT_LE(s.spawn_stats.accepted, s.spawn_stats.drawn);
}

TEST(WorldStep, SpawnedObstaclesEnterFromTheLaneEdge) {
    WorldConfig c;
    c.level = 100.0;  // rate 1.0 per lane per step
    c.warmup_steps = 0;
    WorldState s = new_episode(c, 4);
    s.obstacles.clear();
    world_step(s);
    ASSERT_FALSE(s.obstacles.empty());
    for (const auto& ob : s.obstacles) {
        const Lane& lane = s.lanes[static_cast<std::size_t>(ob.lane_index)];
        if (lane.direction == Direction::LeftToRight) {
            EXPECT_GT(ob.speed, 0.0);
            EXPECT_EQ(ob.head_col(), -1);
        } else {
            EXPECT_LT(ob.speed, 0.0);
            EXPECT_EQ(ob.tail_col(), c.grid_w);
        }
        const auto& cls = c.obstacle_classes[static_cast<std::size_t>(lane.class_id - 1)];
        EXPECT_LE(std::abs(std::abs(ob.speed) - cls.mean_speed), cls.speed_jitter + 1e-12);
        EXPECT_LE(std::abs(ob.length - cls.mean_length), cls.length_jitter + 0.5);
    }
    // One spawn per lane at most: a second one at the same edge would overlap.
    EXPECT_LE(s.obstacles.size(), s.lanes.size());
}

TEST(WorldStep, SurvivorsKeepSpeedAndOnlyFullyExitedAreRemoved) {
    WorldState s = new_episode(WorldConfig{}, 31);
    for (int step = 0; step < 2000; ++step) {
        const auto before = s.obstacles;
        world_step(s);
        std::size_t j = 0;
        for (const auto& ob : before) {
            Obstacle moved = ob;
            moved.head_x += ob.speed;
            const bool any_visible = moved.head_col() >= 0 && moved.tail_col() < s.config.grid_w;
            const bool exited = ob.speed > 0 ? moved.tail_col() >= s.config.grid_w : moved.head_col() < 0;
            if (exited) {
                ASSERT_FALSE(any_visible);
                continue;
            }
            ASSERT_LT(j, s.obstacles.size());
            ASSERT_EQ(s.obstacles[j], moved) << "step " << step;
            ++j;
        }
    }
}

TEST(WorldStep, GoalSpeedConservedAndContained) {
    WorldState s = empty_world(WorldConfig{}, {20.0, 20.0}, {0.5 * std::cos(1.0), 0.5 * std::sin(1.0)});
    for (int i = 0; i < 10000; ++i) {
        world_step(s);
        ASSERT_NEAR(std::hypot(s.goal.vel.x, s.goal.vel.y), 0.5, 1e-9);
        const Pixel o = to_pixel(s.goal.pos);
        ASSERT_GE(o.x, 0);
        ASSERT_GE(o.y, 0);
        ASSERT_LE(o.x + 2, 48);
        ASSERT_LE(o.y + 2, 48);
    }
}

TEST(ActionToVelocity, Headings) {
    const Vec2 east = action_to_velocity(0, 1.0);
    EXPECT_DOUBLE_EQ(east.x, 1.0);
    EXPECT_DOUBLE_EQ(east.y, 0.0);
    const Vec2 south = action_to_velocity(2, 0.5);
    EXPECT_DOUBLE_EQ(south.x, 0.0);
    EXPECT_DOUBLE_EQ(south.y, 0.5);
    const Vec2 diag = action_to_velocity(1, 1.0);
    EXPECT_NEAR(diag.x, 0.70710678, 1e-8);
    EXPECT_NEAR(diag.y, 0.70710678, 1e-8);
    for (int a = 0; a < 8; ++a) {
        const Vec2 v = action_to_velocity(a, 1.0);
        EXPECT_NEAR(v.x, std::cos(a * kPi / 4), 1e-15);
        EXPECT_NEAR(v.y, std::sin(a * kPi / 4), 1e-15);
    }
    EXPECT_THROW(action_to_velocity(8, 1.0), std::invalid_argument);
    EXPECT_THROW(action_to_velocity(-1, 1.0), std::invalid_argument);
}

TEST(AgentStep, ReachingTheGoal) {
    WorldState s = empty_world(two_x(), {10.0, 10.0}, {0.0, 0.0}, {10.0, 10.0});
    const Outcome out = agent_step(s, 0);  // lands on (11, 10), inside the footprint
    EXPECT_EQ(out.kind, OutcomeKind::GoalReached);
    EXPECT_EQ(out.reward, 20);
    EXPECT_EQ(out.steps_taken, 1);
}

TEST(AgentStep, EnteringAnObstacleKills) {
    WorldState s = empty_world(two_x(), {40.0, 40.0}, {0.0, 0.0}, {10.0, 9.0});
    add_obstacle(s, 10, 12.0, 3, 0.0);  // covers (10..12, 10)
    const Outcome out = agent_step(s, 2);
    EXPECT_EQ(out.kind, OutcomeKind::Died);
    EXPECT_EQ(out.reward, -20);
    EXPECT_FALSE(s.agent.alive);
}

TEST(AgentStep, GoalWinsOverObstacle) {
    WorldState s = empty_world(two_x(), {10.0, 10.0}, {0.0, 0.0}, {10.0, 9.0});
    add_obstacle(s, 10, 12.0, 3, 0.0);
    EXPECT_EQ(agent_step(s, 2).kind, OutcomeKind::GoalReached);
}

TEST(AgentStep, TimesOutAtStepLimit) {
    WorldState s = empty_world(two_x(), {40.0, 40.0}, {0.0, 0.0}, {5.0, 5.0});
    s.t = 202;
    const Outcome out = agent_step(s, 4);
    EXPECT_EQ(out.kind, OutcomeKind::TimedOut);
    EXPECT_EQ(out.reward, 0);
    EXPECT_EQ(out.steps_taken, 203);
    EXPECT_THROW(agent_step(s, 0), StateError);
}

TEST(AgentStep, ClampedAtWallsWithoutDying) {
    WorldState s = empty_world(two_x(), {40.0, 40.0}, {0.0, 0.0}, {0.0, 0.0});
    const Outcome out = agent_step(s, 5);
    EXPECT_EQ(out.kind, OutcomeKind::Running);
    EXPECT_EQ(s.agent.pos, (Vec2{0.0, 0.0}));
}

TEST(AgentStep, WorldMovesBeforeTheCheck) {
    // Obstacle arrives at (11, 10) during the step the agent moves there.
    WorldState s = empty_world(two_x(), {40.0, 40.0}, {0.0, 0.0}, {10.0, 10.0});
    add_obstacle(s, 10, 10.0, 1, 1.0);
    EXPECT_EQ(agent_step(s, 0).kind, OutcomeKind::Died);
}

TEST(RenderFrame, GoalOnly) {
    const WorldState s = empty_world(WorldConfig{}, {3.0, 5.0});
    const Frame f = render_frame(s);
    int goals = 0;
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) {
            if (f.at(x, y) == kGoalCell) {
                ++goals;
                EXPECT_TRUE(y >= 5 && y <= 6 && x >= 3 && x <= 4);
            } else {
                EXPECT_EQ(f.at(x, y), kFreeCell);
            }
        }
    }
    EXPECT_EQ(goals, 4);
}

TEST(RenderFrame, ObstacleRoundsHeadAndTrailsLeft) {
    WorldConfig c;
    c.lane_rows = {7};
    WorldState s = empty_world(c, {40.0, 40.0});
    add_obstacle(s, 7, 5.4, 3, 1.0, 2);
    const Frame f = render_frame(s);
    EXPECT_EQ(f.at(3, 7), 2);
    EXPECT_EQ(f.at(4, 7), 2);
    EXPECT_EQ(f.at(5, 7), 2);
    EXPECT_EQ(f.at(2, 7), kFreeCell);
    EXPECT_EQ(f.at(6, 7), kFreeCell);
}

TEST(RenderFrame, ClipsPartiallyVisibleObstacles) {
    WorldState s = empty_world();
    add_obstacle(s, 10, 1.0, 4, 1.0, 3);
    const Frame f = render_frame(s);
    int count = 0;
    for (int x = 0; x < 48; ++x) count += f.at(x, 10) == 3 ? 1 : 0;
    EXPECT_EQ(count, 2);
    EXPECT_EQ(f.at(0, 10), 3);
    EXPECT_EQ(f.at(1, 10), 3);
}

TEST(RenderFrame, GoalOverwritesObstacle) {
    WorldState s = empty_world(WorldConfig{}, {5.0, 9.0});
    add_obstacle(s, 10, 8.0, 6, 0.0, 4);
    const Frame f = render_frame(s);
    EXPECT_EQ(f.at(5, 10), kGoalCell);
    EXPECT_EQ(f.at(6, 10), kGoalCell);
    EXPECT_EQ(f.at(7, 10), 4);
}

TEST(CloneState, LockstepStaysIdentical) {
    WorldState a = new_episode(WorldConfig{}, 12);
    WorldState b = clone_state(a);
    for (int i = 0; i < 100; ++i) {
        world_step(a);
        world_step(b);
        ASSERT_EQ(render_frame(a), render_frame(b));
    }
    EXPECT_EQ(a, b);
}

TEST(CloneState, SteppingCopyLeavesOriginal) {
    const WorldState a = new_episode(WorldConfig{}, 12);
    const WorldState snapshot = a;
    WorldState b = clone_state(a);
    for (int i = 0; i < 10; ++i) world_step(b);
    EXPECT_EQ(a, snapshot);
    EXPECT_EQ(render_frame(clone_state(b)), render_frame(b));
}

TEST(Properties, FramesAreIndependentOfActions) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        WorldState acting = new_episode(two_x(), seed);
        WorldState passive = clone_state(acting);
        Rng actions(seed);
        while (!acting.outcome.finished()) {
            agent_step(acting, static_cast<int>(actions.below(8)));
            world_step(passive);
            ASSERT_EQ(render_frame(acting), render_frame(passive));
        }
    }
}

TEST(Properties, SameActionsSameOutcome) {
    auto run = [](std::uint64_t seed) {
        WorldState s = new_episode(two_x(), seed);
        Rng actions(1000 + seed);
        std::vector<Frame> frames;
        while (!s.outcome.finished()) {
            agent_step(s, static_cast<int>(actions.below(8)));
            frames.push_back(render_frame(s));
        }
        return std::make_pair(s.outcome, frames);
    };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        EXPECT_EQ(run(seed), run(seed));
    }
}

TEST(Rounding, HalfAwayFromZero) {
    EXPECT_EQ(round_px(0.5), 1);
    EXPECT_EQ(round_px(1.5), 2);
    EXPECT_EQ(round_px(-0.5), -1);
    EXPECT_EQ(round_px(-1.4), -1);
    EXPECT_EQ(round_px(2.49), 2);
}
