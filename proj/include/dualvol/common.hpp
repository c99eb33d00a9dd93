#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dualvol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when an input violates an operation's precondition. The CLI maps
// this to exit status 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation produces a non-finite state. The CLI maps this
// to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::int64_t step = -1)
      : std::runtime_error(what), step_(step) {}

  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace dualvol
