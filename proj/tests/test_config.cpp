#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dynplan/config.hpp"
#include "dynplan/errors.hpp"

using namespace dynplan;

namespace {

void expect_same(const RunConfig& a, const RunConfig& b) {
    EXPECT_EQ(a.world, b.world);
    EXPECT_EQ(a.mcts, b.mcts);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.strict_presets, b.strict_presets);
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    expect_same(parse_config_text(""), RunConfig{});
    expect_same(parse_config_text("# only a comment\n\n   \n"), RunConfig{});
}

TEST(Config, SingleOverride) {
    const RunConfig c = parse_config_text("level = 6");
    EXPECT_DOUBLE_EQ(c.world.level, 6.0);
    const RunConfig d = parse_config_text("level = 3.5  # busier\nmodel = noisy:0.1,0.02,1,1\n");
    EXPECT_DOUBLE_EQ(d.world.level, 3.5);
    EXPECT_EQ(d.model.kind, ModelKind::Noisy);
    EXPECT_EQ(d.model.n_samples(), 1);
}

TEST(Config, SpeedPresetThenRefinement) {
    const RunConfig c = parse_config_text("speed = 1x\nmax_steps = 500\n");
    EXPECT_DOUBLE_EQ(c.world.agent_speed, 0.5);
    EXPECT_EQ(c.world.max_steps, 500);
}

TEST(Config, LaneRowsFollowGridHeight) {
    const RunConfig c = parse_config_text("grid_h = 24\n");
    EXPECT_EQ(c.world.lane_rows, default_lane_rows(24));
    const RunConfig d = parse_config_text("lane_rows = 3,9,11\n");
    EXPECT_EQ(d.world.lane_rows, (std::vector<int>{3, 9, 11}));
}

TEST(Config, ClassTable) {
    const RunConfig c = parse_config_text("class3 = 0.8,0.1,2,0\n");
    EXPECT_DOUBLE_EQ(c.world.obstacle_classes[2].mean_speed, 0.8);
    EXPECT_DOUBLE_EQ(c.world.obstacle_classes[2].mean_length, 2.0);
    EXPECT_THROW(parse_config_text("class3 = 0.8,0.1\n"), ConfigError);
}

TEST(Config, NonPresetRolloutLengthIsNotedOnlyWhenStrict) {
    ::testing::internal::CaptureStderr();
    const RunConfig c = parse_config_text("rollout_length = 4\nstrict_presets = true\n");
    const std::string err = ::testing::internal::GetCapturedStderr();
    EXPECT_EQ(c.mcts.rollout_length, 4);
    EXPECT_NE(err.find("rollout_length 4"), std::string::npos);

    ::testing::internal::CaptureStderr();
    (void)parse_config_text("rollout_length = 4\n");
    EXPECT_TRUE(::testing::internal::GetCapturedStderr().empty());

    ::testing::internal::CaptureStderr();
    (void)parse_config_text("rollout_length = 5\nstrict_presets = true\n");
    EXPECT_TRUE(::testing::internal::GetCapturedStderr().empty());
}

TEST(Config, UnknownKeyNamesTheLine) {
    try {
        parse_config_text("level = 2\n\nbogus = 1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
        EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
    }
}

TEST(Config, MalformedValues) {
    for (const char* text : {"level", "level = abc", "n_rollouts = 1.5", "speed = 3x", "model = magic",
                             "strict_presets = maybe", "= 3"}) {
        EXPECT_THROW(parse_config_text(text), ConfigError) << text;
    }
}

TEST(Config, RangeViolations) {
    for (const char* text : {"level = -1", "n_rollouts = 0", "rollout_length = 0", "temperature = 0",
                             "grid_w = 0", "lane_rows = 60", "goal_size = 0", "agent_speed = -1"}) {
        EXPECT_THROW(parse_config_text(text), ConfigError) << text;
    }
}

TEST(Config, KeyValuesRoundTrip) {
    const RunConfig c = parse_config_text(
        "speed = 1x\nlevel = 4.25\nlane_rows = 2,6,10\nclass5 = 1.2,0.1,5,1\nmodel = noisy:0.2,0.01,0.5,3\n"
        "rollout_length = 5\nmaster_seed = 12345678901\n");
    ConfigParser p;
    for (const auto& [k, v] : to_key_values(c)) p.set(k, v);
    expect_same(p.finish(), c);
    for (const auto& [k, v] : to_key_values(c)) {
        EXPECT_NE(std::find(config_keys().begin(), config_keys().end(), k), config_keys().end()) << k;
    }
}

TEST(Config, ParseFile) {
    const auto path = std::filesystem::temp_directory_path() / "dynplan_config_test.cfg";
    {
        std::ofstream out(path);
        out << "n_rollouts = 250\nc_puct = 2.0\n";
    }
    ConfigParser p;
    p.parse_file(path);
    const RunConfig c = p.finish();
    EXPECT_EQ(c.mcts.n_rollouts, 250);
    EXPECT_DOUBLE_EQ(c.mcts.c_puct, 2.0);
    std::filesystem::remove(path);
    EXPECT_THROW(p.parse_file(path), ConfigError);
}

TEST(Config, PresetLengths) {
    for (int k : {1, 3, 5, 10}) EXPECT_TRUE(is_preset_rollout_length(k));
    for (int k : {0, 2, 4, 11}) EXPECT_FALSE(is_preset_rollout_length(k));
}
