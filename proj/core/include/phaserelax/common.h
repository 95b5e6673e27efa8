#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phaserelax {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angles closer than this (radians) are treated as equal.
inline constexpr double kAngleTol = 1e-10;

/// Error raised for precondition breaches and malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduces an angle to [0, 2*pi).
double wrap_angle(double theta);

/// Unsigned angular distance on the circle, in [0, pi].
double angular_distance(double a, double b);

}  // namespace phaserelax
