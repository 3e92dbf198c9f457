#pragma once

#include <stdexcept>
#include <string>

namespace jci {

/// Malformed arguments: unknown ids, overlapping sets, bad configuration.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistical quantity could not be computed (singular covariance, too few samples).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hard constraints of a discovery problem admit no solution.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Both a feature and its negation are infeasible.
class Contradiction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inputs to ADMG refinement disagree with each other.
class RefinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jci
