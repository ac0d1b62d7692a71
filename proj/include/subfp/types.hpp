#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace subfp {

/// A point of R^1 or R^2. One-dimensional problems only use component 0 and
/// keep component 1 at zero, so |x| and <x> are the same formulas in both cases.
using Point = Eigen::Vector2d;
using Jacobian = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;

/// Japanese bracket <x> = (1 + |x|^2)^{1/2}.
inline double bracket(const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); }

inline double bracket(double r) { return std::sqrt(1.0 + r * r); }

/// 90 degree rotation J(a, b) = (-b, a).
inline Point rotate90(const Point& x) { return Point(-x[1], x[0]); }

/// Raised when an iterative solver exhausts its budget or breaks down.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace subfp
