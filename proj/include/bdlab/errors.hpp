#pragma once

#include <stdexcept>
#include <string>

namespace bdlab {

/// Invalid arguments or violated preconditions (wrong lengths, bad parameters).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index outside the valid mode/state range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Requested truncation exceeds the implementation's size caps.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An iterative routine did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mode-sum convergence condition rejects the requested computation.
class ConditionVeto : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bdlab
