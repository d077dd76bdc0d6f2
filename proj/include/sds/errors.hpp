#ifndef SDS_ERRORS_HPP
#define SDS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sds {

// Error taxonomy mirrors the CLI exit codes: ok = 0, numeric failure = 1,
// regime refusal = 2, config error = 3.

// Bad value for a mathematical argument (negative s, non-finite U, ...).
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter combination outside the regime the method covers
// (a*N > 1, single-center planar at a*N = 1, first integral at a = 0, ...).
class regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iteration failed to reach the requested tolerance.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite intermediate, bracket violation, or other internal numeric fault.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent job configuration.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sds

#endif
