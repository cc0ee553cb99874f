#pragma once

#include <stdexcept>
#include <string>

namespace optstop {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// distribution errors
struct EmptySample : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct InsufficientTail : Error { using Error::Error; };
struct DegenerateTail : Error { using Error::Error; };
struct OutOfSupport : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct NegativeCount : Error { using Error::Error; };
struct NoTailMass : Error { using Error::Error; };

// stopping errors
struct InvalidCost : Error { using Error::Error; };
struct UnreachableTarget : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// solver errors
struct InvalidSize : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidSpin : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct EmptyCandidates : Error { using Error::Error; };

// controller errors
struct SessionClosed : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };

// parallel errors
struct EmptyRange : Error { using Error::Error; };

// fitting / reporting errors
struct InsufficientPoints : Error { using Error::Error; };
struct NonPositiveValue : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace optstop
