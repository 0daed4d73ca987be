#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vibronoise {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration or document failed validation. Carries every failure found.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> failures);
  explicit ValidationError(const std::string& failure)
      : ValidationError(std::vector<std::string>{failure}) {}

  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

/// Operation not permitted in the object's current state (e.g. updating a frozen filter).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vibronoise
