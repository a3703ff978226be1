// Shared aliases, constants, and the error hierarchy used across the library.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sideband {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// All public parameters are plain frequencies f = omega/2pi in MHz and times in
// microseconds. Internal dynamical computations convert once to angular
// frequency (rad/us) through this constant; it lives here and nowhere else.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double to_angular(double f_mhz) { return kTwoPi * f_mhz; }
inline double from_angular(double w_rad_per_us) { return w_rad_per_us / kTwoPi; }

// Error hierarchy. The CLI maps these onto process exit codes:
//   ValidationError -> 1 (bad config / bad arguments)
//   NumericalError  -> 2 (integrator failure, step underflow, negativity)
//   InvariantViolation -> 3 (a physical invariant check failed)
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sideband
