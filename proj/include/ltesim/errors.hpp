#pragma once

#include <stdexcept>

namespace ltesim {

/// Invalid scenario parameter (bad bandwidth, out-of-range key, mixed aggregation, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (trace or config); the message carries the line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ltesim
