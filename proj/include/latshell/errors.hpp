#pragma once

#include <stdexcept>
#include <string>

namespace latshell {

// Brute-force feasibility guard tripped; message names the cheaper method.
struct TooLargeError : std::runtime_error {
    explicit TooLargeError(const std::string& what) : std::runtime_error(what) {}
};

// Level-set sampler accepted zero points; message carries draw diagnostics.
struct LevelSetEmptyError : std::runtime_error {
    explicit LevelSetEmptyError(const std::string& what) : std::runtime_error(what) {}
};

// Fast pair counter invoked on a phase without phi(x,y) = phi0(x-y).
struct UnsupportedPhaseError : std::runtime_error {
    explicit UnsupportedPhaseError(const std::string& what) : std::runtime_error(what) {}
};

// Config file / descriptor rejected; message names the failing field.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace latshell
