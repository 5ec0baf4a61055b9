#include "dynplan/forward_models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dynplan {
namespace {

void require_horizon(int k) {
    if (k < 1) {
        throw std::invalid_argument("prediction horizon must be >= 1, got " + std::to_string(k));
    }
}

// Goal footprint centers must keep the whole footprint on the grid.
Vec2 clamp_goal_center(Vec2 c, int goal_size, int width, int height) {
    const double half = 0.5 * (goal_size - 1);
    return {std::clamp(c.x, half, width - 1 - half), std::clamp(c.y, half, height - 1 - half)};
}

std::optional<Vec2> frame_goal(const Frame& frame) {
    Vec2 c;
    if (!frame.goal_center(c.x, c.y)) {
        return std::nullopt;
    }
    return c;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double parse_double(std::string_view text, std::string_view what) {
    // std::from_chars for double is available in libstdc++ >= 11.
    double value = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        throw std::invalid_argument("model spec: bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

class OracleModel final : public HiddenStateModel {
public:
    std::string name() const override { return "oracle"; }

protected:
    PredictedRollout predict_from_state(const WorldState& state, int k) override { return oracle_predict(state, k); }
};

class NoisyModel final : public HiddenStateModel {
public:
    NoisyModel(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {}
    std::string name() const override { return to_string(spec_); }

protected:
    PredictedRollout predict_from_state(const WorldState& state, int k) override {
        return noisy_sample_predict(state, k, spec_.noise, rng_);
    }

private:
    ModelSpec spec_;
    Rng rng_;
};

class FrozenModel final : public HistoryModel {
public:
    explicit FrozenModel(int goal_size) : goal_size_(goal_size) {}
    std::string name() const override { return "frozen"; }

protected:
    PredictedRollout predict_from_history(const History& history, int k) override {
        return frozen_predict(history, k, goal_size_);
    }

private:
    int goal_size_;
};

class VelocityModel final : public HistoryModel {
public:
    explicit VelocityModel(int goal_size) : goal_size_(goal_size) {}
    std::string name() const override { return "velocity"; }

protected:
    PredictedRollout predict_from_history(const History& history, int k) override {
        return velocity_predict(history, k, goal_size_);
    }

private:
    int goal_size_;
};

}  // namespace

History History::starting_from(const Frame& first) {
    History h;
    h.frames.fill(first);
    h.t = 0;
    return h;
}

void History::push(Frame next) {
    std::rotate(frames.begin(), frames.begin() + 1, frames.end());
    frames.back() = std::move(next);
    ++t;
}

PredictedFrame to_predicted(const Frame& frame) {
    PredictedFrame pred(frame.height(), frame.width());
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            if (is_obstacle_cell(frame.at(x, y))) {
                pred.set(x, y, true);
            }
        }
    }
    pred.goal_estimate = frame_goal(frame);
    return pred;
}

Frame to_frame(const PredictedFrame& pred, int goal_size) {
    Frame frame(pred.height, pred.width);
    for (int y = 0; y < pred.height; ++y) {
        for (int x = 0; x < pred.width; ++x) {
            if (pred.occupied(x, y)) {
                frame.at(x, y) = 1;
            }
        }
    }
    if (pred.goal_estimate) {
        const Pixel o = goal_footprint_origin(*pred.goal_estimate, goal_size);
        for (int dy = 0; dy < goal_size; ++dy) {
            for (int dx = 0; dx < goal_size; ++dx) {
                if (frame.in_bounds(o.x + dx, o.y + dy)) {
                    frame.at(o.x + dx, o.y + dy) = kGoalCell;
                }
            }
        }
    }
    return frame;
}

ErrorMap prediction_error(const PredictedFrame& predicted, const Frame& truth) {
    if (predicted.height != truth.height() || predicted.width != truth.width()) {
        throw std::invalid_argument("prediction_error: dimension mismatch");
    }
    ErrorMap err;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            const bool truly = is_obstacle_cell(truth.at(x, y));
            const bool pred = predicted.occupied(x, y);
            if (truly && !pred) {
                err.fn_cells.push_back({x, y});
            } else if (pred && !truly) {
                err.fp_cells.push_back({x, y});
            }
        }
    }
    err.true_goal = frame_goal(truth);
    err.predicted_goal = predicted.goal_estimate;
    if (err.true_goal && err.predicted_goal) {
        err.goal_err = std::hypot(err.true_goal->x - err.predicted_goal->x, err.true_goal->y - err.predicted_goal->y);
    }
    return err;
}

PredictedRollout oracle_predict(const WorldState& state, int k) {
    require_horizon(k);
    PredictedRollout out;
    out.model_name = "oracle";
    out.goal_size = state.config.goal_size;
    out.steps.reserve(static_cast<std::size_t>(k));
    WorldState future = clone_state(state);
    for (int i = 0; i < k; ++i) {
        world_step(future);
        out.steps.push_back(to_predicted(render_frame(future)));
    }
    return out;
}

PredictedRollout frozen_predict(const History& history, int k, int goal_size) {
    require_horizon(k);
    PredictedRollout out;
    out.model_name = "frozen";
    out.goal_size = goal_size;
    const PredictedFrame latest = to_predicted(history.latest());
    out.steps.assign(static_cast<std::size_t>(k), latest);
    return out;
}

std::optional<int> best_row_shift(std::span<const std::uint8_t> prev, std::span<const std::uint8_t> next,
                                  int max_shift) {
    const int n = static_cast<int>(std::min(prev.size(), next.size()));
    int best = 0;
    int best_overlap = 0;
    // Candidate order 0, +1, -1, +2, -2, ... realizes the tie-breaking rule.
    for (int m = 0; m <= 2 * max_shift; ++m) {
        const int s = (m % 2 == 1) ? (m + 1) / 2 : -(m / 2);
        int overlap = 0;
        for (int x = std::max(0, -s); x < n && x + s < n; ++x) {
            overlap += (prev[static_cast<std::size_t>(x)] != 0 && next[static_cast<std::size_t>(x + s)] != 0) ? 1 : 0;
        }
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = s;
        }
    }
    if (best_overlap == 0) {
        return std::nullopt;
    }
    return best;
}

PredictedRollout velocity_predict(const History& history, int k, int goal_size) {
    require_horizon(k);
    const Frame& latest = history.latest();
    const int h = latest.height();
    const int w = latest.width();
    const int observed = history.observed();
    const int first = kHistoryLength - observed;

    std::array<PredictedFrame, kHistoryLength> occ;
    for (int j = 0; j < kHistoryLength; ++j) {
        occ[static_cast<std::size_t>(j)] = to_predicted(history.frames[static_cast<std::size_t>(j)]);
    }
    auto row_of = [&](int j, int y) {
        const auto& cells = occ[static_cast<std::size_t>(j)].occupancy;
        return std::span<const std::uint8_t>(cells.data() + static_cast<std::size_t>(y) * w, static_cast<std::size_t>(w));
    };

    PredictedRollout out;
    out.model_name = "velocity";
    out.goal_size = goal_size;
    out.steps.assign(static_cast<std::size_t>(k), PredictedFrame(h, w));

    for (int y = 0; y < h; ++y) {
        const auto last_row = row_of(kHistoryLength - 1, y);
        if (std::none_of(last_row.begin(), last_row.end(), [](std::uint8_t v) { return v != 0; })) {
            continue;
        }
        double sum = 0.0;
        int pairs = 0;
        for (int j = first; j + 1 < kHistoryLength; ++j) {
            if (const auto s = best_row_shift(row_of(j, y), row_of(j + 1, y))) {
                sum += *s;
                ++pairs;
            }
        }
        // Averaged shift, quantized to a half pixel.
        const double shift = pairs > 0 ? round_px(2.0 * sum / pairs) / 2.0 : 0.0;
        // A half-pixel displacement cannot be rasterized; both neighbouring
        // integer offsets are marked occupied.
        for (int i = 1; i <= k; ++i) {
            const double displacement = i * shift;
            const int lo = static_cast<int>(std::floor(displacement));
            const int hi = static_cast<int>(std::ceil(displacement));
            auto& step = out.steps[static_cast<std::size_t>(i - 1)];
            for (int x = 0; x < w; ++x) {
                for (int offset = lo; offset <= hi; ++offset) {
                    const int src = x - offset;
                    if (src >= 0 && src < w && last_row[static_cast<std::size_t>(src)] != 0) {
                        step.set(x, y, true);
                    }
                }
            }
        }
    }

    // Goal: least-squares constant velocity over the observed centers.
    std::vector<std::pair<double, Vec2>> centers;
    for (int j = first; j < kHistoryLength; ++j) {
        if (const auto c = occ[static_cast<std::size_t>(j)].goal_estimate) {
            centers.emplace_back(static_cast<double>(j), *c);
        }
    }
    const auto last_goal = occ[kHistoryLength - 1].goal_estimate;
    if (!last_goal) {
        return out;
    }
    Vec2 vel{0.0, 0.0};
    if (centers.size() >= 2) {
        double mt = 0.0;
        Vec2 mc;
        for (const auto& [tj, c] : centers) {
            mt += tj;
            mc.x += c.x;
            mc.y += c.y;
        }
        const double n = static_cast<double>(centers.size());
        mt /= n;
        mc.x /= n;
        mc.y /= n;
        double stt = 0.0;
        Vec2 stc;
        for (const auto& [tj, c] : centers) {
            stt += (tj - mt) * (tj - mt);
            stc.x += (tj - mt) * (c.x - mc.x);
            stc.y += (tj - mt) * (c.y - mc.y);
        }
        vel = {stc.x / stt, stc.y / stt};
    }
    const double half = 0.5 * (goal_size - 1);
    Vec2 pos{last_goal->x - half, last_goal->y - half};
    for (int i = 0; i < k; ++i) {
        pos.x += vel.x;
        pos.y += vel.y;
        reflect_into_bounds(pos, vel, w - goal_size, h - goal_size);
        out.steps[static_cast<std::size_t>(i)].goal_estimate = Vec2{pos.x + half, pos.y + half};
    }
    return out;
}

PredictedRollout noisy_sample_predict(const WorldState& state, int k, const NoiseParams& noise, Rng& rng) {
    require_horizon(k);
    if (!(noise.p_fn >= 0.0 && noise.p_fn <= 1.0) || !(noise.p_fp >= 0.0 && noise.p_fp <= 1.0)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
    if (noise.n_samples < 1) {
        throw std::invalid_argument("n_samples must be >= 1");
    }
    if (!(noise.goal_sigma >= 0.0)) {
        throw std::invalid_argument("goal_sigma must be >= 0");
    }
    const int goal_size = state.config.goal_size;
    std::vector<Frame> truth;
    truth.reserve(static_cast<std::size_t>(k));
    WorldState future = clone_state(state);
    for (int i = 0; i < k; ++i) {
        world_step(future);
        truth.push_back(render_frame(future));
    }

    PredictedRollout out;
    out.model_name = to_string(ModelSpec{ModelKind::Noisy, noise});
    out.n_samples = noise.n_samples;
    out.goal_size = goal_size;
    const int h = state.config.grid_h;
    const int w = state.config.grid_w;
    const double log_keep_fp = noise.p_fp < 1.0 ? std::log1p(-noise.p_fp) : 0.0;

    for (int i = 0; i < k; ++i) {
        const Frame& frame = truth[static_cast<std::size_t>(i)];
        PredictedFrame agg(h, w);
        std::vector<double> gx;
        std::vector<double> gy;
        const auto true_goal = frame_goal(frame);
        const double sigma = noise.goal_sigma * std::sqrt(static_cast<double>(i + 1));
        const std::size_t cells = static_cast<std::size_t>(h) * w;

        for (int s = 0; s < noise.n_samples; ++s) {
            for (std::size_t c = 0; c < cells; ++c) {
                const std::uint8_t v = frame.cells()[c];
                if (is_obstacle_cell(v) && !rng.bernoulli(noise.p_fn)) {
                    agg.occupancy[c] = 1;
                }
            }
            // False positives: geometric gaps between hits over the free cells.
            if (noise.p_fp > 0.0) {
                std::size_t c = 0;
                while (true) {
                    std::size_t gap = 0;
                    if (noise.p_fp < 1.0) {
                        const double u = 1.0 - rng.uniform();
                        gap = static_cast<std::size_t>(std::floor(std::log(u) / log_keep_fp));
                    }
                    // Advance over `gap` eligible cells, then hit the next one.
                    std::size_t skipped = 0;
                    while (c < cells && (frame.cells()[c] != kFreeCell || skipped < gap)) {
                        if (frame.cells()[c] == kFreeCell) {
                            ++skipped;
                        }
                        ++c;
                    }
                    if (c >= cells) {
                        break;
                    }
                    agg.occupancy[c] = 1;
                    ++c;
                }
            }
            if (true_goal) {
                gx.push_back(true_goal->x + sigma * rng.normal());
                gy.push_back(true_goal->y + sigma * rng.normal());
            }
        }
        if (true_goal) {
            if (sigma == 0.0) {
                agg.goal_estimate = true_goal;
            } else {
                agg.goal_estimate = clamp_goal_center({median(gx), median(gy)}, goal_size, w, h);
            }
        }
        out.steps.push_back(std::move(agg));
    }
    return out;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
    if (a.kind != b.kind) {
        return false;
    }
    if (a.kind != ModelKind::Noisy) {
        return true;
    }
    return a.noise.p_fn == b.noise.p_fn && a.noise.p_fp == b.noise.p_fp && a.noise.goal_sigma == b.noise.goal_sigma &&
           a.noise.n_samples == b.noise.n_samples;
}

ModelSpec parse_model_spec(std::string_view text) {
    ModelSpec spec;
    if (text == "oracle") {
        spec.kind = ModelKind::Oracle;
    } else if (text == "frozen") {
        spec.kind = ModelKind::Frozen;
    } else if (text == "velocity") {
        spec.kind = ModelKind::Velocity;
    } else if (text == "random" || text == "none") {
        spec.kind = ModelKind::Random;
    } else if (text == "noisy") {
        spec.kind = ModelKind::Noisy;
    } else if (text.starts_with("noisy:")) {
        spec.kind = ModelKind::Noisy;
        std::string_view rest = text.substr(6);
        std::array<std::string_view, 4> parts;
        std::size_t count = 0;
        while (true) {
            const std::size_t comma = rest.find(',');
            if (count == parts.size()) {
                throw std::invalid_argument("model spec: noisy takes p_fn,p_fp,sigma,n");
            }
            parts[count++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        if (count != parts.size()) {
            throw std::invalid_argument("model spec: noisy takes p_fn,p_fp,sigma,n");
        }
        spec.noise.p_fn = parse_double(parts[0], "p_fn");
        spec.noise.p_fp = parse_double(parts[1], "p_fp");
        spec.noise.goal_sigma = parse_double(parts[2], "sigma");
        const double n = parse_double(parts[3], "n");
        if (n < 1.0 || n != std::floor(n)) {
            throw std::invalid_argument("model spec: n must be a positive integer");
        }
        spec.noise.n_samples = static_cast<int>(n);
        if (spec.noise.p_fn < 0.0 || spec.noise.p_fn > 1.0 || spec.noise.p_fp < 0.0 || spec.noise.p_fp > 1.0) {
            throw std::invalid_argument("model spec: probabilities must lie in [0, 1]");
        }
        if (spec.noise.goal_sigma < 0.0) {
            throw std::invalid_argument("model spec: sigma must be >= 0");
        }
    } else {
        throw std::invalid_argument("unknown model '" + std::string(text) + "'");
    }
    return spec;
}

std::string to_string(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::Oracle: return "oracle";
        case ModelKind::Frozen: return "frozen";
        case ModelKind::Velocity: return "velocity";
        case ModelKind::Random: return "random";
        case ModelKind::Noisy: break;
    }
    auto num = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    return "noisy:" + num(spec.noise.p_fn) + "," + num(spec.noise.p_fp) + "," + num(spec.noise.goal_sigma) + "," +
           std::to_string(spec.noise.n_samples);
}

std::unique_ptr<ForwardModel> make_model(const ModelSpec& spec, int goal_size, std::uint64_t seed) {
    switch (spec.kind) {
        case ModelKind::Oracle: return std::make_unique<OracleModel>();
        case ModelKind::Frozen: return std::make_unique<FrozenModel>(goal_size);
        case ModelKind::Velocity: return std::make_unique<VelocityModel>(goal_size);
        case ModelKind::Noisy: return std::make_unique<NoisyModel>(spec, seed);
        case ModelKind::Random: return nullptr;
    }
    return nullptr;
}

}  // namespace dynplan
