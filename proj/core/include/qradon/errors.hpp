#pragma once

#include <stdexcept>
#include <string>

namespace qradon {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Elements of two different groups were mixed in one operation.
struct GroupMismatch : Error {
  using Error::Error;
};

// A chart coordinate left the domain of the chart (e.g. scale <= 0).
struct ChartDomainViolation : Error {
  using Error::Error;
};

// A coset point was used with the wrong quotient or chain.
struct QuotientMismatch : Error {
  using Error::Error;
};

// A function or measure rule was paired with a space it does not live on.
struct SpaceMismatch : Error {
  using Error::Error;
};

// A weight function took a non-positive value where positivity is required.
struct NonpositiveRho : Error {
  using Error::Error;
};

// A weight function failed its covariance identity beyond tolerance.
struct RhoInvalid : Error {
  using Error::Error;
};

// No section value is available for the requested coset.
struct SectionMissing : Error {
  using Error::Error;
};

// A translated support left the region where quadrature is trusted.
struct SupportEscape : Error {
  using Error::Error;
};

// A check's structural precondition does not hold for the given chain.
struct HypothesisViolated : Error {
  using Error::Error;
};

// A denominator fell below the safe threshold in a quotient of functions.
struct DegenerateDenominator : Error {
  using Error::Error;
};

// Unknown case identifier.
struct UnknownCase : Error {
  using Error::Error;
};

// Unknown check identifier.
struct UnknownCheck : Error {
  using Error::Error;
};

// Malformed input file (composition table, report, ...).
struct ParseFailure : Error {
  using Error::Error;
};

}  // namespace qradon
