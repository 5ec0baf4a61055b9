#pragma once

// Episode runner and benchmark grid. Every cell of a grid runs the same
// episode seeds, and each episode derives its model/planner streams from its
// own seed, so results do not depend on scheduling.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynplan/config.hpp"
#include "dynplan/env.hpp"
#include "dynplan/forward_models.hpp"
#include "dynplan/planner.hpp"

namespace dynplan {

struct StepRecord {
    int t = 0;
    Vec2 agent_pos;
    int action = 0;
    int reward = 0;
    OutcomeKind outcome = OutcomeKind::Running;
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeRecord {
    std::uint64_t episode_seed = 0;
    Outcome outcome;
    int steps = 0;
    std::vector<StepRecord> trace;
    std::vector<Frame> frames;  // frames[0] is t=0; filled when EpisodeOptions::record_frames
    std::string model_name;
    RunConfig config;
    std::uint64_t model_calls = 0;
    std::string error;  // set when the episode was aborted
};

struct EpisodeOptions {
    bool record_frames = false;
};

EpisodeRecord run_episode(const RunConfig& cfg, std::uint64_t episode_seed, EpisodeOptions opts = {});

// Re-applies the logged actions with the logged seed and compares rewards
// and the final outcome.
bool replay_matches(const EpisodeRecord& record);

struct BenchRow {
    std::string model;
    int n_samples = 1;
    std::string speed;  // "1x", "2x", ...
    int rollout_length = 1;
    int goals = 0;
    int timeouts = 0;
    int deaths = 0;
    std::optional<double> steps_mean;  // over episodes that did not die
    std::optional<double> steps_std;   // population std
    int episodes = 0;
};

// G/T/D counts plus mean and population std of steps over non-death episodes.
BenchRow summarize(std::span<const EpisodeRecord> records);

std::string speed_label(const WorldConfig& w);

struct GridSpec {
    std::vector<ModelSpec> models;
    std::vector<int> rollout_lengths;
    std::vector<AgentSpeed> speeds;
};

struct BenchCell {
    RunConfig config;
    std::vector<EpisodeRecord> episodes;
};

struct BenchTable {
    std::vector<BenchRow> rows;
};

// Runs every (model, speed, k) cell over episode seeds 0..n_episodes-1 of
// `master_seed`, using up to `parallelism` threads. Throws if an episode aborted.
std::vector<BenchCell> run_cells(const RunConfig& base, const GridSpec& grid, int n_episodes,
                                 std::uint64_t master_seed, int parallelism);
BenchTable run_benchmark(const RunConfig& base, const GridSpec& grid, int n_episodes, std::uint64_t master_seed,
                         int parallelism);

// Header: model,n_samples,speed,k,G,T,D,S_mean,S_std,episodes
std::string to_csv(const BenchTable& table);
std::string to_text(const BenchTable& table);

// JSON-lines trace. Line 1 is a header {"episode_seed", "model", "config"};
// each following line is one step {t, agent_pos, action, reward, outcome, frame_rle}.
// Requires frames to have been recorded.
std::string to_jsonl(const EpisodeRecord& record);
EpisodeRecord from_jsonl(std::string_view text);

}  // namespace dynplan
