#pragma once

#include <stdexcept>
#include <string>

namespace pifa {

// Base class for every failure this library raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- construction of probability spaces / variables / partitions ---
struct EmptyWeights : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };
struct SpaceMismatch : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct InvalidPartition : Error { using Error::Error; };

// --- forecasters ---
struct EmptyMenu : Error { using Error::Error; };

// --- aggregators ---
struct DomainError : Error { using Error::Error; };
struct WeightMismatch : Error { using Error::Error; };
struct SingularCovariance : Error { using Error::Error; };

// --- experiments ---
struct NonTrivialityError : Error { using Error::Error; };
struct BoundaryOmega : Error { using Error::Error; };
struct DepthTooSmall : Error { using Error::Error; };
struct JamisonViolation : Error { using Error::Error; };
struct NonPositiveWeight : Error { using Error::Error; };

// --- configuration / CLI ---
struct ConfigError : Error { using Error::Error; };

// Catch-all for violated call preconditions that have no dedicated type.
struct InvalidArgument : Error { using Error::Error; };

}  // namespace pifa
