#pragma once

#include <stdexcept>
#include <string>

namespace dynplan {

// Invalid WorldConfig / MCTSConfig / config-file content.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No free cell could be found for agent or goal placement.
class PlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation applied to an episode in the wrong phase (e.g. stepping a finished one).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace dynplan
