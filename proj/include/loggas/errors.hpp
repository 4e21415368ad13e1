#pragma once

#include <stdexcept>
#include <string>

namespace loggas {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A coordinate list contains two equal points.
struct DuplicatePointError : Error { using Error::Error; };

/// A coordinate is NaN or infinite.
struct NonFiniteError : Error { using Error::Error; };

/// Two configurations that must have equal cardinality do not.
struct CardinalityMismatchError : Error { using Error::Error; };

/// An inner window is not contained in the outer one.
struct WindowNestingError : Error { using Error::Error; };

/// An argument lies outside the mathematical domain of the operation.
struct DomainError : Error { using Error::Error; };

/// A point of a tuple or interior draw coincides with an existing point,
/// which would give the pair energy an infinite value.
struct SingularOverlapError : Error { using Error::Error; };

/// An exterior configuration intersects the inner window.
struct ExteriorOverlapError : Error { using Error::Error; };

/// steps/burn-in/thinning values that cannot define a run.
struct InvalidScheduleError : Error { using Error::Error; };

/// Requested exact computation beyond the supported size.
struct TooLargeError : Error { using Error::Error; };

/// Every sampled Monte Carlo weight vanished; no estimate is possible.
struct DegenerateWeightError : Error { using Error::Error; };

/// An ordered-tuple enumeration would exceed the configured cap.
struct CombinatorialBlowupError : Error { using Error::Error; };

/// A scaled test function's support leaves the sampled domain.
struct SupportOverflowError : Error { using Error::Error; };

/// Malformed input text (JSON or JSONL).
struct ParseError : Error { using Error::Error; };

/// Structurally valid input with invalid content (unknown key, bad value).
struct ValidationError : Error { using Error::Error; };

}  // namespace loggas
