#pragma once

#include <stdexcept>
#include <string>

namespace dqst {

/// Operand shapes do not fit together (non-square input, d² mismatch, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a documented precondition (non-Hermitian observable,
/// negative rate, identity missing from a measurement set, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced non-finite values or a solver did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested reconstruction is not unique: the data does not determine
/// the quantity (rank-deficient design matrix, target outside the
/// observable subspace).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string reason, int rank, int required,
                  const std::string& message)
      : std::runtime_error(message),
        reason_(std::move(reason)),
        rank_(rank),
        required_(required) {}

  const std::string& reason() const { return reason_; }
  int rank() const { return rank_; }
  int required() const { return required_; }

 private:
  std::string reason_;
  int rank_;
  int required_;
};

}  // namespace dqst
