#pragma once

#include <stdexcept>
#include <string>

namespace dpp {

// Bad input: out-of-domain arguments, malformed configurations, config errors.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its stated accuracy
// (quadrature refinement, node doubling, step collapse).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal consistency check failed (e.g. a kernel that must be real
// came back with a non-negligible imaginary part).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_domain(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

}  // namespace dpp
