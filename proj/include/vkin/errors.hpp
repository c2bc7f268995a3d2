#pragma once

#include <stdexcept>
#include <string>

namespace vkin {

/// Base class for every library failure.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input files or configuration could not be parsed or violate format rules.
struct ParseError : Error {
    using Error::Error;
};

/// Timestamps are not strictly increasing.
struct NonMonotoneTime : ParseError {
    using ParseError::ParseError;
};

/// Fewer samples than the operation requires.
struct TooFewSamples : Error {
    using Error::Error;
};

/// Trajectory speed is below the machine-scale threshold; the tangent frame
/// and the quantities derived from it are undefined at this instant.
struct ZeroVelocity : Error {
    using Error::Error;
};

/// The wheel mount coincides with the instantaneous center of rotation.
struct WheelAtRotationCenter : Error {
    using Error::Error;
};

/// Evaluation time outside the fitted trajectory domain.
struct OutOfDomain : Error {
    using Error::Error;
};

/// A stop interval whose tangent cannot be filled consistently.
struct UnresolvableInterval : Error {
    using Error::Error;
};

/// Least-squares design matrix is rank deficient (or the fit is unusable).
struct DegenerateDesign : Error {
    using Error::Error;
};

/// Requested value lies outside the declared steering range.
struct OutOfRange : Error {
    using Error::Error;
};

/// Steering command maps outside (-pi/2, pi/2); curvature is undefined.
struct SteeringOutOfRange : Error {
    using Error::Error;
};

/// Integration step must be positive.
struct NonPositiveStep : Error {
    using Error::Error;
};

/// Time ranges of the series to synchronize do not overlap.
struct NoOverlap : Error {
    using Error::Error;
};

}  // namespace vkin
