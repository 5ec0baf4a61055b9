// dynplan command-line entry point: play, bench, render, validate.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynplan/config.hpp"
#include "dynplan/errors.hpp"
#include "dynplan/harness.hpp"
#include "dynplan/render.hpp"
#include "dynplan/validation.hpp"

namespace fs = std::filesystem;
using namespace dynplan;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // --<config key> value
};

void add_common(CLI::App& app, CommonOptions& opts) {
    app.add_option("-c,--config", opts.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--set", opts.sets, "override, key=value (repeatable)");
    for (const auto& key : config_keys()) {
        app.add_option_function<std::string>(
            "--" + key, [&opts, key](const std::string& v) { opts.flags[key] = v; }, "config key " + key);
    }
}

RunConfig load(const CommonOptions& opts) {
    ConfigParser parser;
    if (!opts.config_path.empty()) {
        parser.parse_file(opts.config_path);
    }
    for (const auto& [key, value] : opts.flags) {
        parser.set(key, value);
    }
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        parser.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return parser.finish();
}

fs::path output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("DYNPLAN_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return flag_value;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string frame_name(const std::string& prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03d.ppm", prefix.c_str(), i);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-based planning in a dynamic navigation world"};
    app.require_subcommand(1);

    // play
    CommonOptions play_opts;
    std::uint64_t play_episode = 0;
    std::string trace_path;
    std::string ppm_dir;
    auto* play = app.add_subcommand("play", "run one episode");
    add_common(*play, play_opts);
    play->add_option("--episode", play_episode, "episode index under master_seed");
    play->add_option("--trace", trace_path, "write JSON-lines trace here");
    play->add_option("--ppm-dir", ppm_dir, "dump one PPM per step into this directory");

    // bench
    CommonOptions bench_opts;
    std::vector<std::string> bench_models{"oracle", "velocity", "noisy", "frozen", "random"};
    std::vector<int> bench_k{1, 3, 5, 10};
    std::vector<std::string> bench_speeds{"2x", "1x"};
    int bench_episodes = 100;
    int bench_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string csv_path;
    std::string bench_out = ".";
    auto* bench = app.add_subcommand("bench", "run a model x speed x rollout-length grid");
    add_common(*bench, bench_opts);
    bench->add_option("--models", bench_models, "model specs, space separated");
    bench->add_option("--k", bench_k, "rollout lengths")->delimiter(',');
    bench->add_option("--speeds", bench_speeds, "agent speeds (1x, 2x)")->delimiter(',');
    bench->add_option("--episodes", bench_episodes, "episodes per cell")->check(CLI::PositiveNumber);
    bench->add_option("--jobs", bench_jobs, "worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--csv", csv_path, "CSV file name (relative to --out)");
    bench->add_option("--out", bench_out, "output directory (DYNPLAN_OUT_DIR overrides)");

    // render
    std::string render_trace;
    int render_step = 0;
    int render_horizon = 4;
    std::string render_model = "noisy";
    std::string render_out = ".";
    auto* render = app.add_subcommand("render", "render oracle, model and error maps for one decision step");
    render->add_option("--trace", render_trace, "trace written by play --trace")->required()->check(CLI::ExistingFile);
    render->add_option("--step", render_step, "decision step t");
    render->add_option("--horizon", render_horizon, "prediction steps")->check(CLI::PositiveNumber);
    render->add_option("--model", render_model, "model spec to compare against the oracle");
    render->add_option("--out", render_out, "output directory (DYNPLAN_OUT_DIR overrides)");

    // validate
    CommonOptions validate_opts;
    auto* validate_cmd = app.add_subcommand("validate", "run the statistical property checks");
    add_common(*validate_cmd, validate_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*play) {
            const RunConfig cfg = load(play_opts);
            const std::uint64_t seed = episode_seed(cfg.world.master_seed, play_episode);
            const bool frames = !trace_path.empty() || !ppm_dir.empty();
            const EpisodeRecord rec = run_episode(cfg, seed, {frames});
            if (!rec.error.empty()) {
                std::cerr << "episode aborted: " << rec.error << "\n";
                return 2;
            }
            if (!trace_path.empty()) {
                write_file_atomic(trace_path, to_jsonl(rec));
            }
            if (!ppm_dir.empty()) {
                const fs::path dir = output_dir(ppm_dir);
                fs::create_directories(dir);
                for (std::size_t i = 0; i < rec.frames.size(); ++i) {
                    std::optional<Pixel> agent;
                    if (i > 0) {
                        agent = to_pixel(rec.trace[i - 1].agent_pos);
                    }
                    render_ppm(rec.frames[i], agent, dir / frame_name("frame", static_cast<int>(i)));
                }
            }
            std::cout << to_string(rec.outcome.kind) << " after " << rec.steps << " steps, reward "
                      << rec.outcome.reward << " (model " << rec.model_name << ", seed " << seed << ")\n";
            return 0;
        }

        if (*bench) {
            const RunConfig cfg = load(bench_opts);
            GridSpec grid;
            for (const auto& m : bench_models) {
                grid.models.push_back(parse_model_spec(m));
            }
            grid.rollout_lengths = bench_k;
            for (const auto& s : bench_speeds) {
                if (s == "1x") {
                    grid.speeds.push_back(AgentSpeed::k1x);
                } else if (s == "2x") {
                    grid.speeds.push_back(AgentSpeed::k2x);
                } else {
                    throw ConfigError("unknown speed '" + s + "'");
                }
            }
            const BenchTable table = run_benchmark(cfg, grid, bench_episodes, cfg.world.master_seed, bench_jobs);
            std::cout << to_text(table);
            if (!csv_path.empty()) {
                const fs::path dir = output_dir(bench_out);
                fs::create_directories(dir);
                write_file_atomic(dir / csv_path, to_csv(table));
            }
            return 0;
        }

        if (*render) {
            const EpisodeRecord rec = from_jsonl(read_file(render_trace));
            if (render_step < 0 || render_step > static_cast<int>(rec.trace.size())) {
                throw std::invalid_argument("--step outside the trace");
            }
            WorldState state = new_episode(rec.config.world, rec.episode_seed);
            History history = History::starting_from(render_frame(state));
            for (int i = 0; i < render_step; ++i) {
                if (state.outcome.finished()) {
                    break;
                }
                agent_step(state, rec.trace[static_cast<std::size_t>(i)].action);
                history.push(render_frame(state));
            }
            const int gs = rec.config.world.goal_size;
            const ModelSpec spec = parse_model_spec(render_model);
            auto model = make_model(spec, gs, derive_seed(rec.episode_seed, stream::kModel));
            if (!model) {
                throw std::invalid_argument("render needs a forward model, not '" + render_model + "'");
            }
            const PredictedRollout predicted = model->predict(DecisionContext{history, state}, render_horizon);
            WorldState future = clone_state(state);
            const fs::path dir = output_dir(render_out);
            fs::create_directories(dir);
            const Pixel agent = to_pixel(state.agent.pos);
            for (int i = 0; i < render_horizon; ++i) {
                world_step(future);
                const Frame truth = render_frame(future);
                const auto& pred = predicted.steps[static_cast<std::size_t>(i)];
                render_ppm(truth, agent, dir / frame_name("oracle", i + 1));
                render_ppm(to_frame(pred, gs), agent, dir / frame_name("model", i + 1));
                const ErrorMap err = prediction_error(pred, truth);
                render_error_map(err, truth, gs, dir / frame_name("error", i + 1));
                std::cout << "t+" << (i + 1) << ": FN " << err.fn_cells.size() << ", FP " << err.fp_cells.size();
                if (err.goal_err) {
                    std::cout << ", goal error " << *err.goal_err;
                }
                std::cout << "\n";
            }
            return 0;
        }

        if (*validate_cmd) {
            const RunConfig cfg = load(validate_opts);
            bool all = true;
            for (const auto& r : run_validation_suite(cfg.world, cfg.world.master_seed)) {
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.measured << " (threshold "
                          << r.threshold << ") " << r.detail << "\n";
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
