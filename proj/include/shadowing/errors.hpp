#pragma once

#include <stdexcept>
#include <string>

namespace shadowing {

// Bad user input: malformed curve data, out-of-range parameters, nonsensical
// configuration. Maps to CLI exit code 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// The computation itself failed: integrator hit the singular set, a root was
// not bracketed, quadrature failed to converge. Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The input violates a structural assumption of the requested analysis
// (e.g. zero rotation index where a positively oriented curve is required).
// Maps to CLI exit code 4.
class hypothesis_error : public std::runtime_error {
public:
    explicit hypothesis_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace shadowing
