#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace gameda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Caller violated a precondition (dimension mismatch, infeasible point, empty set...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is not available for this object (e.g. a game without a Hessian).
class NotImplementedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bregman divergence requested where the one-sided derivative is infinite.
class DivergenceUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Score overflow or non-finite state during a run.
class NumericAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kFeasible = 1e-9;
inline constexpr double kCone = 1e-9;
}  // namespace tol

}  // namespace gameda
