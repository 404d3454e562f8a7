#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace holcus {

// Precondition violated by the caller (bad index, size mismatch, empty input).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised only when unitarity validation is switched on.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Problem too large for the dense simulator or the brute-force oracle.
class CapacityError : public std::length_error {
public:
  using std::length_error::length_error;
};

// Broken internal invariant; indicates a bug, never bad user input.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class OptimizationError : public std::runtime_error {
public:
  OptimizationError(const std::string &what, std::vector<double> params)
      : std::runtime_error(what), params_(std::move(params)) {}

  const std::vector<double> &params() const noexcept { return params_; }

private:
  std::vector<double> params_;
};

} // namespace holcus
