#pragma once

#include <stdexcept>
#include <string>

namespace clt {

// Input-side failures: bad dimensions, malformed files, parameters outside
// their documented domain. The CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : ValidationError {
    explicit DimensionError(const std::string& msg) : ValidationError(msg) {}
};

struct DomainError : ValidationError {
    explicit DomainError(const std::string& msg) : ValidationError(msg) {}
};

// Chain is reducible or periodic where the operation needs ergodicity.
struct StructureError : ValidationError {
    explicit StructureError(const std::string& msg) : ValidationError(msg) {}
};

// Numerical failures discovered while computing: the CLI maps these to exit 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StabilityError : NumericalError {
    explicit StabilityError(const std::string& msg) : NumericalError(msg) {}
};

struct NotPsdError : NumericalError {
    explicit NotPsdError(const std::string& msg) : NumericalError(msg) {}
};

// Asymptotic covariance failed the positive-definiteness requirement of a
// CLT experiment.
struct DegenerateCovarianceError : NumericalError {
    explicit DegenerateCovarianceError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace clt
