#pragma once

#include <stdexcept>
#include <string>

namespace sdgp {

/// Parameter or argument outside the admissible set (bad alpha/beta, bad
/// grid sizes, malformed config). Maps to CLI exit code 1.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to deliver (non-convergence, bracketing
/// failure, poor fit). Carries the stage that failed. Maps to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// File could not be read or written. Maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdgp
