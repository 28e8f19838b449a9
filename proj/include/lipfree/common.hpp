#pragma once

#include <stdexcept>
#include <string>

namespace lipfree {

using PointId = int;

// Tolerance for exact metric identities (symmetry, triangle inequality, geodesic sums).
inline constexpr double kMetricTol = 1e-12;

// Tolerance for optimization certificates (primal/dual agreement, Lipschitz slack).
inline constexpr double kDualityTol = 1e-9;

enum class ErrorKind {
  Structural,     // malformed input: shapes, unknown ids, mismatched spaces
  Precondition,   // a stated hypothesis of an operation fails
  Verification,   // a computed result violates its own contract
  Resolution,     // the discretization is too coarse for the request
  Contradiction,  // a branch the underlying argument rules out for valid inputs
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the mass that would have to be discarded, so callers can report
// how far the input was from admissible.
class ContradictionError : public Error {
 public:
  ContradictionError(const std::string& msg, double j_mass)
      : Error(ErrorKind::Contradiction, msg), j_mass_(j_mass) {}
  double j_mass() const { return j_mass_; }

 private:
  double j_mass_;
};

}  // namespace lipfree
