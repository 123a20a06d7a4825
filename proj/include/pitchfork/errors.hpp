#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pitchfork {

/// A requested view or pullback window lies outside the recorded path window.
class OutOfWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve did not reach its convergence target; carries the
/// residual history for diagnostics.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

}  // namespace pitchfork
