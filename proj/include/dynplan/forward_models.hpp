#pragma once

// Forward models: given the present, predict k future obstacle-occupancy
// grids and goal positions. One PredictedRollout is produced per decision
// and shared read-only by every search iteration, which is valid because
// the world never reacts to the agent.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynplan/env.hpp"
#include "dynplan/frame.hpp"
#include "dynplan/rng.hpp"

namespace dynplan {

inline constexpr int kHistoryLength = 4;

// The 4 most recent frames, oldest first. Before 4 frames exist the earliest
// frame is repeated; `t` tells how many of the leading entries are padding.
struct History {
    std::array<Frame, kHistoryLength> frames;
    int t = 0;

    static History starting_from(const Frame& first);
    void push(Frame next);
    const Frame& latest() const { return frames[kHistoryLength - 1]; }
    // Number of frames that were actually observed (1..4).
    int observed() const { return t + 1 < kHistoryLength ? t + 1 : kHistoryLength; }
};

struct PredictedFrame {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> occupancy;  // 1 = obstacle; never set on goal pixels of the source frame
    std::optional<Vec2> goal_estimate;    // footprint center, inside the grid

    PredictedFrame() = default;
    PredictedFrame(int h, int w) : height(h), width(w), occupancy(static_cast<std::size_t>(h) * w, 0) {}

    bool occupied(int x, int y) const { return occupancy[static_cast<std::size_t>(y) * width + x] != 0; }
    bool occupied(Pixel p) const { return occupied(p.x, p.y); }
    void set(int x, int y, bool v) { occupancy[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    friend bool operator==(const PredictedFrame&, const PredictedFrame&) = default;
};

// Obstacle cells become occupied, the GOAL centroid becomes the goal estimate.
PredictedFrame to_predicted(const Frame& frame);
// Inverse view for rendering: occupied cells as class 1, goal footprint as GOAL.
Frame to_frame(const PredictedFrame& pred, int goal_size);

struct PredictedRollout {
    std::vector<PredictedFrame> steps;  // steps[i] predicts t+1+i
    std::string model_name;
    int n_samples = 1;
    int goal_size = 2;
};

struct ErrorMap {
    std::vector<Pixel> fn_cells;  // truly obstacle, predicted free
    std::vector<Pixel> fp_cells;  // predicted obstacle, truly free
    std::optional<double> goal_err;
    std::optional<Vec2> true_goal;
    std::optional<Vec2> predicted_goal;
};

ErrorMap prediction_error(const PredictedFrame& predicted, const Frame& truth);

struct NoiseParams {
    double p_fn = 0.10;
    double p_fp = 0.02;
    double goal_sigma = 1.0;  // px; step i uses goal_sigma * sqrt(i)
    int n_samples = 5;
};

// Clairvoyant: steps a clone of the hidden state, future spawns included.
PredictedRollout oracle_predict(const WorldState& state, int k);
// Persistence: every step repeats the latest frame.
PredictedRollout frozen_predict(const History& history, int k, int goal_size = 2);
// Per-row shift estimation plus constant-velocity goal extrapolation.
// Never predicts obstacles that are not visible in the latest frame.
PredictedRollout velocity_predict(const History& history, int k, int goal_size = 2);
// n_samples corrupted oracle rollouts, union of occupancy, median goal.
PredictedRollout noisy_sample_predict(const WorldState& state, int k, const NoiseParams& noise, Rng& rng);

inline constexpr int kMaxRowShift = 4;

// Integer shift s in [-max_shift, max_shift] maximizing sum_x prev[x]*next[x+s].
// Ties go to the smaller |s|, then to the positive shift. Returns nullopt
// when no candidate shift overlaps.
std::optional<int> best_row_shift(std::span<const std::uint8_t> prev, std::span<const std::uint8_t> next,
                                  int max_shift = kMaxRowShift);

// ---------------------------------------------------------------------------
// Model selection and the per-decision interface.

enum class ModelKind { Oracle, Frozen, Velocity, Noisy, Random };

struct ModelSpec {
    ModelKind kind = ModelKind::Oracle;
    NoiseParams noise;

    int n_samples() const { return kind == ModelKind::Noisy ? noise.n_samples : 1; }
    friend bool operator==(const ModelSpec& a, const ModelSpec& b);
};

// "oracle" | "frozen" | "velocity" | "noisy:p_fn,p_fp,sigma,n" | "noisy" | "random" (alias "none").
ModelSpec parse_model_spec(std::string_view text);
std::string to_string(const ModelSpec& spec);

// What a model may look at when asked for a prediction. Observation-only
// models receive just the history through HistoryModel.
struct DecisionContext {
    const History& history;
    const WorldState& world;
};

class ForwardModel {
public:
    virtual ~ForwardModel() = default;

    // Counted; the harness checks there is exactly one call per decision.
    PredictedRollout predict(const DecisionContext& ctx, int k) {
        ++calls_;
        return do_predict(ctx, k);
    }
    std::uint64_t calls() const { return calls_; }
    virtual std::string name() const = 0;

protected:
    virtual PredictedRollout do_predict(const DecisionContext& ctx, int k) = 0;

private:
    std::uint64_t calls_ = 0;
};

class HistoryModel : public ForwardModel {
protected:
    PredictedRollout do_predict(const DecisionContext& ctx, int k) final {
        return predict_from_history(ctx.history, k);
    }
    virtual PredictedRollout predict_from_history(const History& history, int k) = 0;
};

class HiddenStateModel : public ForwardModel {
protected:
    PredictedRollout do_predict(const DecisionContext& ctx, int k) final { return predict_from_state(ctx.world, k); }
    virtual PredictedRollout predict_from_state(const WorldState& state, int k) = 0;
};

// nullptr for ModelKind::Random. `seed` feeds stochastic models only.
std::unique_ptr<ForwardModel> make_model(const ModelSpec& spec, int goal_size, std::uint64_t seed);

}  // namespace dynplan
