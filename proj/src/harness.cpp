#include "dynplan/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace dynplan {
namespace {

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

EpisodeRecord run_episode(const RunConfig& cfg, std::uint64_t episode_seed, EpisodeOptions opts) {
    EpisodeRecord rec;
    rec.episode_seed = episode_seed;
    rec.config = cfg;
    rec.model_name = to_string(cfg.model);

    WorldState state = new_episode(cfg.world, episode_seed);
    const int k = cfg.mcts.rollout_length;
    const Kinematics kin{cfg.world.agent_speed, cfg.world.grid_w, cfg.world.grid_h};
    auto model = make_model(cfg.model, cfg.world.goal_size, derive_seed(episode_seed, stream::kModel));
    Rng planner_rng(derive_seed(episode_seed, stream::kPlanner));
    Rng policy_rng(derive_seed(episode_seed, stream::kPolicy));

    Frame frame = render_frame(state);
    History history = History::starting_from(frame);
    if (opts.record_frames) {
        rec.frames.push_back(frame);
    }

    try {
        while (!state.outcome.finished()) {
            int action = 0;
            if (model) {
                const PredictedRollout rollout = model->predict(DecisionContext{history, state}, k);
                action = plan_action(state.agent.pos, rollout, cfg.mcts, kin, planner_rng);
            } else {
                action = static_cast<int>(policy_rng.below(kNumActions));
            }
            const Outcome out = agent_step(state, action);
            frame = render_frame(state);
            if (opts.record_frames) {
                rec.frames.push_back(frame);
            }
            history.push(std::move(frame));
            rec.trace.push_back({state.t, state.agent.pos, action, out.reward, out.kind});
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.outcome = state.outcome;
    rec.steps = state.t;
    rec.model_calls = model ? model->calls() : 0;
    return rec;
}

bool replay_matches(const EpisodeRecord& record) {
    WorldState state = new_episode(record.config.world, record.episode_seed);
    for (const auto& step : record.trace) {
        if (state.outcome.finished()) {
            return false;
        }
        const Outcome out = agent_step(state, step.action);
        if (out.reward != step.reward || out.kind != step.outcome || state.t != step.t ||
            state.agent.pos != step.agent_pos) {
            return false;
        }
    }
    return state.outcome == record.outcome;
}

BenchRow summarize(std::span<const EpisodeRecord> records) {
    if (records.empty()) {
        throw std::invalid_argument("summarize: no episodes");
    }
    BenchRow row;
    const RunConfig& cfg = records.front().config;
    row.model = to_string(cfg.model);
    row.n_samples = cfg.model.n_samples();
    row.speed = speed_label(cfg.world);
    row.rollout_length = cfg.mcts.rollout_length;
    row.episodes = static_cast<int>(records.size());

    std::vector<double> survived;
    for (const auto& r : records) {
        switch (r.outcome.kind) {
            case OutcomeKind::GoalReached: ++row.goals; break;
            case OutcomeKind::TimedOut: ++row.timeouts; break;
            case OutcomeKind::Died: ++row.deaths; break;
            case OutcomeKind::Running:
                throw std::invalid_argument("summarize: episode " + std::to_string(r.episode_seed) + " did not finish");
        }
        if (r.outcome.kind != OutcomeKind::Died) {
            survived.push_back(static_cast<double>(r.steps));
        }
    }
    if (!survived.empty()) {
        double mean = 0.0;
        for (double s : survived) mean += s;
        mean /= static_cast<double>(survived.size());
        double var = 0.0;
        for (double s : survived) var += (s - mean) * (s - mean);
        var /= static_cast<double>(survived.size());
        row.steps_mean = mean;
        row.steps_std = std::sqrt(var);
    }
    return row;
}

std::string speed_label(const WorldConfig& w) {
    if (w.goal_speed <= 0.0) {
        std::ostringstream ss;
        ss << w.agent_speed << "px";
        return ss.str();
    }
    std::ostringstream ss;
    ss << (w.agent_speed / w.goal_speed) << "x";
    return ss.str();
}

std::vector<BenchCell> run_cells(const RunConfig& base, const GridSpec& grid, int n_episodes,
                                 std::uint64_t master_seed, int parallelism) {
    if (n_episodes < 1) {
        throw std::invalid_argument("n_episodes must be >= 1");
    }
    std::vector<BenchCell> cells;
    for (const auto& model : grid.models) {
        for (const auto speed : grid.speeds) {
            for (const int k : grid.rollout_lengths) {
                BenchCell cell;
                cell.config = base;
                cell.config.model = model;
                cell.config.world.with_speed(speed);
                cell.config.world.master_seed = master_seed;
                cell.config.mcts.rollout_length = k;
                validate(cell.config.world);
                validate(cell.config.mcts);
                cell.episodes.resize(static_cast<std::size_t>(n_episodes));
                cells.push_back(std::move(cell));
            }
        }
    }

    const std::size_t total = cells.size() * static_cast<std::size_t>(n_episodes);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) {
                return;
            }
            auto& cell = cells[job / static_cast<std::size_t>(n_episodes)];
            const std::size_t ep = job % static_cast<std::size_t>(n_episodes);
            cell.episodes[ep] = run_episode(cell.config, episode_seed(master_seed, ep));
        }
    };
    const int threads = std::max(1, parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }

    for (const auto& cell : cells) {
        for (const auto& ep : cell.episodes) {
            if (!ep.error.empty()) {
                throw std::runtime_error("episode " + std::to_string(ep.episode_seed) + " (" + ep.model_name +
                                         ") aborted: " + ep.error);
            }
        }
    }
    return cells;
}

BenchTable run_benchmark(const RunConfig& base, const GridSpec& grid, int n_episodes, std::uint64_t master_seed,
                         int parallelism) {
    BenchTable table;
    for (const auto& cell : run_cells(base, grid, n_episodes, master_seed, parallelism)) {
        table.rows.push_back(summarize(cell.episodes));
    }
    return table;
}

std::string to_csv(const BenchTable& table) {
    std::string out = "model,n_samples,speed,k,G,T,D,S_mean,S_std,episodes\n";
    for (const auto& r : table.rows) {
        out += csv_field(r.model) + "," + std::to_string(r.n_samples) + "," + r.speed + "," +
               std::to_string(r.rollout_length) + "," + std::to_string(r.goals) + "," + std::to_string(r.timeouts) +
               "," + std::to_string(r.deaths) + "," + (r.steps_mean ? fmt_fixed(*r.steps_mean, 2) : "") + "," +
               (r.steps_std ? fmt_fixed(*r.steps_std, 2) : "") + "," + std::to_string(r.episodes) + "\n";
    }
    return out;
}

std::string to_text(const BenchTable& table) {
    std::ostringstream ss;
    ss << std::left << std::setw(24) << "model" << std::right << std::setw(6) << "speed" << std::setw(4) << "k"
       << std::setw(5) << "G" << std::setw(5) << "T" << std::setw(5) << "D" << "  S\n";
    for (const auto& r : table.rows) {
        ss << std::left << std::setw(24) << r.model << std::right << std::setw(6) << r.speed << std::setw(4)
           << r.rollout_length << std::setw(5) << r.goals << std::setw(5) << r.timeouts << std::setw(5) << r.deaths
           << "  ";
        if (r.steps_mean) {
            ss << fmt_fixed(*r.steps_mean, 1) << " +/- " << fmt_fixed(*r.steps_std, 1);
        } else {
            ss << "-";
        }
        ss << "\n";
    }
    return ss.str();
}

std::string to_jsonl(const EpisodeRecord& record) {
    using nlohmann::ordered_json;
    if (record.frames.size() != record.trace.size() + 1) {
        throw std::invalid_argument("to_jsonl: episode was run without frame recording");
    }
    ordered_json header;
    header["episode_seed"] = record.episode_seed;
    header["model"] = record.model_name;
    ordered_json cfg = ordered_json::object();
    for (const auto& [key, value] : to_key_values(record.config)) {
        cfg[key] = value;
    }
    header["config"] = cfg;
    header["initial_frame_rle"] = encode_rle(record.frames.front());
    std::string out = header.dump() + "\n";
    for (std::size_t i = 0; i < record.trace.size(); ++i) {
        const auto& s = record.trace[i];
        ordered_json line;
        line["t"] = s.t;
        line["agent_pos"] = {s.agent_pos.x, s.agent_pos.y};
        line["action"] = s.action;
        line["reward"] = s.reward;
        line["outcome"] = std::string(to_string(s.outcome));
        line["frame_rle"] = encode_rle(record.frames[i + 1]);
        out += line.dump() + "\n";
    }
    return out;
}

EpisodeRecord from_jsonl(std::string_view text) {
    using nlohmann::json;
    EpisodeRecord rec;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("trace: empty input");
    }
    const json header = json::parse(line);
    rec.episode_seed = header.at("episode_seed").get<std::uint64_t>();
    rec.model_name = header.at("model").get<std::string>();
    ConfigParser parser;
    for (const auto& [key, value] : header.at("config").items()) {
        parser.set(key, value.get<std::string>());
    }
    rec.config = parser.finish();
    const int h = rec.config.world.grid_h;
    const int w = rec.config.world.grid_w;
    rec.frames.push_back(decode_rle(header.at("initial_frame_rle").get<std::string>(), h, w));
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const json j = json::parse(line);
        StepRecord s;
        s.t = j.at("t").get<int>();
        s.agent_pos = {j.at("agent_pos").at(0).get<double>(), j.at("agent_pos").at(1).get<double>()};
        s.action = j.at("action").get<int>();
        s.reward = j.at("reward").get<int>();
        s.outcome = outcome_from_string(j.at("outcome").get<std::string>());
        rec.trace.push_back(s);
        rec.frames.push_back(decode_rle(j.at("frame_rle").get<std::string>(), h, w));
    }
    if (!rec.trace.empty()) {
        const auto& last = rec.trace.back();
        rec.outcome = {last.outcome, last.reward, last.t};
        rec.steps = last.t;
    }
    return rec;
}

}  // namespace dynplan
