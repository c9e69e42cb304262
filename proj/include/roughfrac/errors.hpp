#pragma once

#include <stdexcept>
#include <string>

namespace roughfrac {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical hypothesis of an operation does not hold for the given
// parameters. The message always names the violated hypothesis verbatim,
// e.g. "0 < alpha < m*n".
class HypothesisViolation : public Error {
 public:
  explicit HypothesisViolation(std::string hypothesis, std::string detail = "")
      : Error(detail.empty() ? "hypothesis violated: " + hypothesis
                             : "hypothesis violated: " + hypothesis + " (" + detail + ")"),
        hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// Input outside the mathematical domain of a function (e.g. a kernel
// evaluated at the origin, where no direction exists).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration: unknown keys, unparsable values, missing
// required fields, inconsistent schema version.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A weight evaluated to a non-finite value on a cell where the integrand
// does not vanish.
class NonFiniteWeight : public Error {
 public:
  using Error::Error;
};

}  // namespace roughfrac
