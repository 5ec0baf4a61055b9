#include "dynplan/config.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dynplan/errors.hpp"

namespace dynplan {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) {
            return out;
        }
        s = s.substr(pos + 1);
    }
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
    Int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

std::string fmt_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

bool is_preset_rollout_length(int k) { return k == 1 || k == 3 || k == 5 || k == 10; }

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "grid_h", "grid_w", "level", "spawn_base_rate", "lane_rows", "class1", "class2", "class3", "class4",
        "class5", "goal_speed", "goal_size", "speed", "agent_speed", "max_steps", "warmup_steps", "master_seed",
        "n_rollouts", "rollout_length", "temperature", "c_puct", "prior_kappa", "shaping_beta", "model",
        "strict_presets",
    };
    return keys;
}

void ConfigParser::set(std::string_view key, std::string_view value) {
    WorldConfig& w = cfg_.world;
    MCTSConfig& m = cfg_.mcts;
    if (key == "grid_h") {
        w.grid_h = to_int<int>(key, value);
    } else if (key == "grid_w") {
        w.grid_w = to_int<int>(key, value);
    } else if (key == "level") {
        w.level = to_double(key, value);
    } else if (key == "spawn_base_rate") {
        w.spawn_base_rate = to_double(key, value);
    } else if (key == "lane_rows") {
        w.lane_rows.clear();
        if (!value.empty()) {
            for (auto part : split(value, ',')) {
                w.lane_rows.push_back(to_int<int>(key, part));
            }
        }
        lane_rows_explicit_ = true;
    } else if (key.size() == 6 && key.starts_with("class") && key[5] >= '1' && key[5] <= '5') {
        const auto idx = static_cast<std::size_t>(key[5] - '1');
        const auto parts = split(value, ',');
        if (parts.size() != 4) {
            throw ConfigError(std::string(key) + ": expected mean_speed,speed_jitter,mean_length,length_jitter");
        }
        if (w.obstacle_classes.size() <= idx) {
            throw ConfigError(std::string(key) + ": class table has only " +
                              std::to_string(w.obstacle_classes.size()) + " entries");
        }
        auto& cls = w.obstacle_classes[idx];
        cls.mean_speed = to_double(key, parts[0]);
        cls.speed_jitter = to_double(key, parts[1]);
        cls.mean_length = to_double(key, parts[2]);
        cls.length_jitter = to_double(key, parts[3]);
    } else if (key == "goal_speed") {
        w.goal_speed = to_double(key, value);
    } else if (key == "goal_size") {
        w.goal_size = to_int<int>(key, value);
    } else if (key == "speed") {
        if (value == "1x") {
            w.with_speed(AgentSpeed::k1x);
        } else if (value == "2x") {
            w.with_speed(AgentSpeed::k2x);
        } else {
            throw ConfigError("speed: expected 1x or 2x, got '" + std::string(value) + "'");
        }
    } else if (key == "agent_speed") {
        w.agent_speed = to_double(key, value);
    } else if (key == "max_steps") {
        w.max_steps = to_int<int>(key, value);
    } else if (key == "warmup_steps") {
        w.warmup_steps = to_int<int>(key, value);
    } else if (key == "master_seed") {
        w.master_seed = to_int<std::uint64_t>(key, value);
    } else if (key == "n_rollouts") {
        m.n_rollouts = to_int<int>(key, value);
    } else if (key == "rollout_length") {
        m.rollout_length = to_int<int>(key, value);
    } else if (key == "temperature") {
        m.temperature = to_double(key, value);
    } else if (key == "c_puct") {
        m.c_puct = to_double(key, value);
    } else if (key == "prior_kappa") {
        m.prior_kappa = to_double(key, value);
    } else if (key == "shaping_beta") {
        m.shaping_beta = to_double(key, value);
    } else if (key == "model") {
        try {
            cfg_.model = parse_model_spec(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    } else if (key == "strict_presets") {
        cfg_.strict_presets = to_bool(key, value);
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

void ConfigParser::parse_text(std::string_view text, std::string_view source) {
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(where + "empty key");
        }
        try {
            set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

void ConfigParser::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    parse_text(ss.str(), path.string());
}

RunConfig ConfigParser::finish() const {
    RunConfig out = cfg_;
    if (!lane_rows_explicit_) {
        out.world.lane_rows = default_lane_rows(out.world.grid_h);
    }
    validate(out.world);
    validate(out.mcts);
    if (out.strict_presets && !is_preset_rollout_length(out.mcts.rollout_length)) {
        std::cerr << "note: rollout_length " << out.mcts.rollout_length << " is not one of the presets 1, 3, 5, 10\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg) {
    const WorldConfig& w = cfg.world;
    const MCTSConfig& m = cfg.mcts;
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("grid_h", std::to_string(w.grid_h));
    kv.emplace_back("grid_w", std::to_string(w.grid_w));
    kv.emplace_back("level", fmt_double(w.level));
    kv.emplace_back("spawn_base_rate", fmt_double(w.spawn_base_rate));
    std::string rows;
    for (std::size_t i = 0; i < w.lane_rows.size(); ++i) {
        rows += (i ? "," : "") + std::to_string(w.lane_rows[i]);
    }
    kv.emplace_back("lane_rows", rows);
    for (std::size_t i = 0; i < w.obstacle_classes.size() && i < 5; ++i) {
        const auto& c = w.obstacle_classes[i];
        kv.emplace_back("class" + std::to_string(i + 1), fmt_double(c.mean_speed) + "," + fmt_double(c.speed_jitter) +
                                                             "," + fmt_double(c.mean_length) + "," +
                                                             fmt_double(c.length_jitter));
    }
    kv.emplace_back("goal_speed", fmt_double(w.goal_speed));
    kv.emplace_back("goal_size", std::to_string(w.goal_size));
    kv.emplace_back("agent_speed", fmt_double(w.agent_speed));
    kv.emplace_back("max_steps", std::to_string(w.max_steps));
    kv.emplace_back("warmup_steps", std::to_string(w.warmup_steps));
    kv.emplace_back("master_seed", std::to_string(w.master_seed));
    kv.emplace_back("n_rollouts", std::to_string(m.n_rollouts));
    kv.emplace_back("rollout_length", std::to_string(m.rollout_length));
    kv.emplace_back("temperature", fmt_double(m.temperature));
    kv.emplace_back("c_puct", fmt_double(m.c_puct));
    kv.emplace_back("prior_kappa", fmt_double(m.prior_kappa));
    kv.emplace_back("shaping_beta", fmt_double(m.shaping_beta));
    kv.emplace_back("model", to_string(cfg.model));
    return kv;
}

}  // namespace dynplan
