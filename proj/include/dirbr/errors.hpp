#pragma once

#include <stdexcept>
#include <string>

namespace dirbr {

/// Argument outside the mathematical domain of an operation (x <= 0, NaN,
/// proportions on the simplex boundary, non-positive parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Vector/matrix sizes that do not agree, or an index out of range.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Loss of positive definiteness in the information matrix.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirbr
