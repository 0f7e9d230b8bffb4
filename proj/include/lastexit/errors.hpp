// Error taxonomy. Every error carries the process exit code the CLI maps it to:
// 2 = bad configuration/arguments, 3 = unsupported model/boundary,
// 4 = verification failure, 5 = resource limit.
#pragma once

#include <stdexcept>
#include <string>

namespace lastexit {

class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Malformed config, out-of-domain arguments, values outside tabulated ranges.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string msg) : Error(std::move(msg), 2) {}
};

// Model or boundary outside the supported regime (linear boundary, missing
// Pickands constant, non-embeddable covariance).
class UnsupportedError : public Error {
public:
    explicit UnsupportedError(std::string msg) : Error(std::move(msg), 3) {}
};

// A certified property failed or a verifier's hypotheses are violated.
class VerificationError : public Error {
public:
    explicit VerificationError(std::string msg) : Error(std::move(msg), 4) {}
};

// Memory/size budgets exceeded.
class ResourceError : public Error {
public:
    explicit ResourceError(std::string msg) : Error(std::move(msg), 5) {}
};

}  // namespace lastexit
