#include "subfp/splitting.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace subfp {

std::vector<Point> certificate_scan_grid(int dim, double r_max, int count, double r_min,
                                         int angles) {
  if (count < 4 || !(r_max > r_min) || !(r_min > 0.0))
    throw std::invalid_argument("certificate_scan_grid: bad parameters");
  const int per_radius = dim == 1 ? 2 : angles;
  const int radii = std::max(2, (count - 1) / per_radius);
  std::vector<Point> pts = radial_samples(dim, r_min, r_max, radii, angles);
  pts.emplace_back(0.0, 0.0);
  return pts;
}

std::pair<double, Point> splitting_certificate(const ForceField& field, const Weight& weight,
                                               double p, double a_target, double M, double R,
                                               const std::vector<Point>& scan) {
  if (scan.empty()) throw std::invalid_argument("splitting_certificate: empty scan");
  const double expo = field.gamma() + weight.s() - 2.0;
  double worst = -std::numeric_limits<double>::infinity();
  Point at = scan.front();
  for (const Point& x : scan) {
    const double v = psi0(weight, p, field, x, M, R) + a_target * std::pow(bracket(x), expo);
    if (v > worst) {
      worst = v;
      at = x;
    }
  }
  return {worst, at};
}

SplittingResult find_splitting_constants(const ForceField& field, const Weight& weight, double p,
                                         double a_target, const std::vector<Point>& scan,
                                         int budget) {
  if (!(a_target > 0.0)) throw std::invalid_argument("find_splitting_constants: a_target <= 0");
  if (scan.empty()) throw std::invalid_argument("find_splitting_constants: empty scan");
  double r_scan = 0.0;
  for (const Point& x : scan) r_scan = std::max(r_scan, x.norm());
  const double R_max = std::max(1.0, r_scan / 8.0);

  SplittingResult res;
  res.M = 1.0;
  res.R = 1.0;
  for (res.iterations = 1; res.iterations <= budget; ++res.iterations) {
    auto [worst, at] = splitting_certificate(field, weight, p, a_target, res.M, res.R, scan);
    res.certificate_max = worst;
    res.worst_point = at;
    if (worst <= 0.0) {
      res.success = true;
      return res;
    }
    if (chi_R(at, res.R) < 1.0) {
      res.R *= 2.0;
      if (res.R > R_max) break;
    } else {
      res.M *= 2.0;
    }
  }
  std::ostringstream msg;
  msg << "splitting search failed: certificate max " << res.certificate_max << " at |x| = "
      << res.worst_point.norm() << " (M = " << res.M << ", R = " << res.R << ")";
  throw SplittingFailure(msg.str(), res);
}

}  // namespace subfp
