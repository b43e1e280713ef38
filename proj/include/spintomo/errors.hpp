#pragma once

#include <stdexcept>
#include <string>

namespace spintomo {

// Numeric failures of the protocol itself: vanishing Clebsch-Gordan
// denominators, ill-conditioned inversions, inconsistent coefficient sets.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Experimental configuration that cannot realize the reconstruction protocol,
// e.g. a Ramsey sequence with the first pulse still on.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-format and filesystem failures. Messages name the offending line.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace spintomo
