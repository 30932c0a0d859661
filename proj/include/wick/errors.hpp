#pragma once

#include <stdexcept>
#include <string>

namespace wick {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : EngineError {
    using EngineError::EngineError;
};

// A derivative (or any operation needing coefficients beyond the trusted
// order) was requested on a jet whose trusted order is exhausted.
struct JetOrderExhausted : EngineError {
    using EngineError::EngineError;
};

struct NotInvertible : EngineError {
    using EngineError::EngineError;
};

struct KindMismatch : EngineError {
    using EngineError::EngineError;
};

// Division by the formal parameter hit a nonzero order-zero term.
struct NegativeLambdaPower : EngineError {
    using EngineError::EngineError;
};

struct DegenerateMetric : EngineError {
    using EngineError::EngineError;
};

struct NonHermitianMetric : EngineError {
    using EngineError::EngineError;
};

struct NonClosedOmega : EngineError {
    using EngineError::EngineError;
};

struct NonTypeOneOne : EngineError {
    using EngineError::EngineError;
};

struct ConfigError : EngineError {
    using EngineError::EngineError;
};

} // namespace wick
