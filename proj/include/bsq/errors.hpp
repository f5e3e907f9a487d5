#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An argument fell outside the open domain of a generator, the support of a
// distribution, or the (0,1) range of a probability.
struct DomainError : Error { using Error::Error; };

// Empty sample / empty weighted point list.
struct EmptyInput : Error { using Error::Error; };

// Weights of a discrete measure do not sum to one.
struct InvalidWeights : Error { using Error::Error; };

// No order statistic above the requested level.
struct TailTooSmall : Error { using Error::Error; };

// A value to be pulled back through the inverse of gamma' lies outside the
// range of gamma'.
struct InversionError : Error { using Error::Error; };

// Quadrature failed to converge on an integral that was not flagged divergent.
struct OracleFailure : Error { using Error::Error; };

// The asymptotic-variance double integral diverges.
struct VarianceDiverges : Error { using Error::Error; };

// A required derivative (gamma''' or f') is not available.
struct CapabilityError : Error { using Error::Error; };

// Density vanished where a quantile-density ratio was requested.
struct SingularDensity : Error { using Error::Error; };

// No confidence interval can be attached (divergent or nonpositive variance,
// or no variance recipe for the measure).
struct NoInterval : Error { using Error::Error; };

// Malformed input file or string.
struct ParseError : Error { using Error::Error; };

// A manifest or argument set violates a structural constraint.
struct ValidationError : Error { using Error::Error; };

// Filesystem failure.
struct IOError : Error { using Error::Error; };

} // namespace bsq
