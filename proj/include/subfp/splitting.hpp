#pragma once

#include "subfp/force_field.hpp"
#include "subfp/weights.hpp"

#include <vector>

namespace subfp {

/// Scan points for certificates: log-spaced radii in [r_min, r_max] plus the origin.
/// 1D uses both signs; 2D uses `angles` directions per radius. Total about `count`.
std::vector<Point> certificate_scan_grid(int dim, double r_max, int count, double r_min = 1e-3,
                                         int angles = 16);

struct SplittingResult {
  double M = 0.0;
  double R = 0.0;
  double certificate_max = 0.0;  // max over the scan of psi0 + a_target <x>^{gamma+s-2}
  Point worst_point = Point::Zero();
  int iterations = 0;
  bool success = false;
};

/// Thrown when the search budget runs out; carries the last state.
class SplittingFailure : public ConvergenceError {
public:
  SplittingFailure(const std::string& what, SplittingResult last)
      : ConvergenceError(what), result(last) {}
  SplittingResult result;
};

/// Certificate value max_x psi0(x; M, R) + a_target <x>^{gamma+s-2} and the argmax.
std::pair<double, Point> splitting_certificate(const ForceField& field, const Weight& weight,
                                               double p, double a_target, double M, double R,
                                               const std::vector<Point>& scan);

/// Search (M, R) starting at (1, 1): double R while the worst point lies outside
/// the plateau of chi_R, double M otherwise.
SplittingResult find_splitting_constants(const ForceField& field, const Weight& weight, double p,
                                         double a_target, const std::vector<Point>& scan,
                                         int budget = 400);

}  // namespace subfp
