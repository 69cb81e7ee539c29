#pragma once

#include <stdexcept>
#include <string>

namespace drexp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter outside the open domain of its family (or at a singularity).
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// Observations violate the family's support constraints.
class InvalidDataError : public Error {
 public:
  using Error::Error;
};

/// The unconstrained likelihood maximizer falls outside the family domain.
class MleOutsideDomainError : public Error {
 public:
  MleOutsideDomainError(const std::string& what, double unconstrained)
      : Error(what), unconstrained_(unconstrained) {}

  /// The offending unconstrained estimate (theta-hat, or sigma2-hat for Normal).
  double unconstrained_value() const { return unconstrained_; }

 private:
  double unconstrained_ = 0.0;
};

/// No parameter satisfies the divergence bound.
class EmptyAdmissibleSetError : public Error {
 public:
  using Error::Error;
};

/// Numeric integration failed to converge to the requested tolerance.
class OracleFailureError : public Error {
 public:
  using Error::Error;
};

/// Risk functional requested for a family that cannot host it.
class UnsupportedCombinationError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment plan.
class PlanError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (CSV rows, config values).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace drexp
