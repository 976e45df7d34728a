#pragma once

#include <stdexcept>
#include <string>

namespace inflex {

/// Malformed or out-of-domain arguments (maps to CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model was asked for a partial derivative beyond its declared order.
class OrderOverflow : public InvalidInput {
 public:
  OrderOverflow(const std::string& what, int requested, int available)
      : InvalidInput(what), requested_(requested), available_(available) {}
  int requested() const { return requested_; }
  int available() const { return available_; }

 private:
  int requested_;
  int available_;
};

/// A numerical procedure could not reach its declared accuracy.
class AccuracyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested wave number lies beyond the grid Nyquist limit.
class AliasingError : public AccuracyFailure {
 public:
  using AccuracyFailure::AccuracyFailure;
};

}  // namespace inflex
