#pragma once

#include <stdexcept>
#include <string>

namespace fgs {

/// Base class for all numerical/contract failures raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };

// wave-model
struct NonPositiveVelocity : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct NonInjectivePhase : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };

// ray-dynamics
struct MomentumUnderflow : Error { using Error::Error; };
struct SingularZ : Error { using Error::Error; };

// init-decomposition
struct UnsupportedForm : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// sampling
struct AssumptionViolated : Error { using Error::Error; };
struct CDFNotMonotone : Error { using Error::Error; };

// reconstruction
struct GridMismatch : Error { using Error::Error; };

// reference-solvers
struct CFLViolation : Error { using Error::Error; };
struct DomainTooSmall : Error { using Error::Error; };

// experiments
struct InsufficientData : Error { using Error::Error; };

} // namespace fgs
