#pragma once

#include <stdexcept>
#include <string>

namespace sprec {

// Bad user input or violated precondition. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A size guard (matrix entries, ML subset count) was exceeded.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A column lies numerically inside the span it is being projected against.
class DegenerateColumn : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Formula evaluated outside its domain, e.g. log(n - k) with n - k < 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sprec
