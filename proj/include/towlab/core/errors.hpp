#pragma once

#include <stdexcept>
#include <string>

namespace towlab {

// Bad or inconsistent configuration (CFL violation, stack/operator
// mismatch, unparsable config file, ...). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical computation produced a non-finite value. The message names
// the offending time level or sample path.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace towlab
