#pragma once

#include <stdexcept>
#include <string>

namespace infodesign {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : Error {
    using Error::Error;
};

struct DisconnectedGraph : Error {
    using Error::Error;
};

struct AssumptionViolated : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    long iterations;
    double gap;
    NonConvergence(long iters, double g)
        : Error("equilibrium solver did not converge after " + std::to_string(iters) +
                " sweeps (gap " + std::to_string(g) + ")"),
          iterations(iters), gap(g) {}
};

struct PatternMismatch : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct RecoveryMismatch : Error {
    using Error::Error;
};

struct GridTooLarge : Error {
    using Error::Error;
};

struct SolverStall : Error {
    using Error::Error;
};

struct NoPairs : Error {
    using Error::Error;
};

}  // namespace infodesign
