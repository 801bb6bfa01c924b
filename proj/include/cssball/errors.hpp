#pragma once

#include <stdexcept>
#include <string>

namespace cssball {

// A precondition on a physical or numerical parameter was violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cssball
