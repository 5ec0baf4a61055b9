#pragma once

// Line-based "key = value" run configuration. '#' starts a comment. Keys are
// applied in file order, so a later "agent_speed" refines an earlier
// "speed = 1x" preset. Unknown keys are rejected.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynplan/env.hpp"
#include "dynplan/forward_models.hpp"
#include "dynplan/planner.hpp"

namespace dynplan {

struct RunConfig {
    WorldConfig world;
    MCTSConfig mcts;
    ModelSpec model;
    // When set, rollout lengths outside {1, 3, 5, 10} are reported on stderr
    // (still accepted).
    bool strict_presets = false;
};

// All recognized keys, in documentation order.
const std::vector<std::string>& config_keys();

class ConfigParser {
public:
    explicit ConfigParser(RunConfig base = {}) : cfg_(std::move(base)) {}

    // Throws ConfigError("<source>:<line>: ...") on malformed lines or unknown keys.
    void parse_text(std::string_view text, std::string_view source = "<config>");
    void parse_file(const std::filesystem::path& path);
    // Single override, e.g. from a CLI flag.
    void set(std::string_view key, std::string_view value);

    // Validates and returns the configuration.
    RunConfig finish() const;

private:
    RunConfig cfg_;
    bool lane_rows_explicit_ = false;
};

inline RunConfig parse_config_text(std::string_view text) {
    ConfigParser p;
    p.parse_text(text);
    return p.finish();
}

// key/value pairs that reproduce `cfg` when parsed (used in trace headers).
std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg);

bool is_preset_rollout_length(int k);

}  // namespace dynplan
