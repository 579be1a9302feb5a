#pragma once

#include <stdexcept>
#include <string>

namespace qrng {

// Exit-code mapping used by the CLI: ConfigError -> 2, IoError -> 4.
// Statistical acceptance failures are reported, not thrown (exit 3).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qrng
