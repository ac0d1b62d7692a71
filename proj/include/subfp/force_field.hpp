#pragma once

#include "subfp/expression.hpp"
#include "subfp/types.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace subfp {

using ScalarMap = std::function<double(const Point&)>;
using VectorMap = std::function<Point(const Point&)>;
using MatrixMap = std::function<Jacobian(const Point&)>;

/// Confinement force field F on R^d (d = 1 or 2) with exponent gamma in (0,1).
///
/// A field may carry a potential V with F = grad V + F0. When additionally
/// e^{-V} F0 = J grad(psi) for a known stream function psi, the field carries
/// psi as well; the discretization uses it to make e^{-V} an exact discrete
/// equilibrium.
class ForceField {
public:
  struct Parts {
    int dim = 1;
    double gamma = 0.5;
    double R0 = 1.0;
    VectorMap force;
    ScalarMap divergence;  // empty: central differences
    MatrixMap jacobian;    // empty: central differences
    ScalarMap potential;
    VectorMap potential_gradient;
    ScalarMap stream;
    std::string kind = "custom";
    std::map<std::string, double> params;
  };

  explicit ForceField(Parts parts);

  int dim() const { return parts_.dim; }
  double gamma() const { return parts_.gamma; }
  double R0() const { return parts_.R0; }
  const std::string& kind() const { return parts_.kind; }
  const std::map<std::string, double>& params() const { return parts_.params; }

  Point force(const Point& x) const { return parts_.force(x); }
  double divergence(const Point& x) const;
  Jacobian jacobian(const Point& x) const;

  bool has_potential() const { return static_cast<bool>(parts_.potential); }
  double potential(const Point& x) const;
  Point potential_gradient(const Point& x) const;

  bool has_stream() const { return static_cast<bool>(parts_.stream); }
  double stream(const Point& x) const;

  /// Finite-difference divergence and Jacobian (step 1e-5 <x>), regardless of
  /// whether closed forms are attached.
  double divergence_fd(const Point& x) const;
  Jacobian jacobian_fd(const Point& x) const;

private:
  Parts parts_;
};

/// F(x) = scale * x <x>^{gamma-2}, the gradient of V = scale <x>^gamma / gamma.
ForceField canonical_gradient_field(double gamma, double scale, int dim = 1, double R0 = 1.0);

/// F = F_base + amplitude * J x <x>^{gamma-2} * modulation(x) in 2D.
/// An empty modulation means modulation == 1; for a canonical base this keeps
/// div(e^{-V} F0) = 0 and attaches the stream function.
ForceField rotated_field(const ForceField& base, double amplitude, ScalarMap modulation = {});

/// Modulation 1 + c x1/<x> used by the configuration files.
ScalarMap linear_modulation(double c);

/// User supplied field from component expressions; derivatives by differences.
ForceField custom_field(int dim, double gamma, const Expression& f1, const Expression& f2,
                        double R0 = 1.0);

/// F == 0 with potential V == 0. Not confining; used for pure-diffusion checks.
ForceField zero_field(int dim);

struct ConditionReport {
  double inf_radial_constant = 0.0;
  double sup_div_constant = 0.0;
  double sup_DF_constant = 0.0;
  int sample_count = 0;
  int outside_count = 0;
  bool pass = false;
};

ConditionReport verify_conditions(const ForceField& field, std::span<const Point> samples,
                                  double R0);

/// max_x |div(e^{-V}(F - grad V))| using the field's own potential and gradient.
double check_case1_structure(const ForceField& field, std::span<const Point> samples);

/// Same with a candidate potential V; grad V and the divergence use fourth-order
/// central differences.
double check_case1_structure(const ForceField& field, const ScalarMap& V,
                             std::span<const Point> samples);

/// Radii log-spaced in [r_min, r_max] times directions (both signs in 1D,
/// `angles` evenly spaced directions in 2D).
std::vector<Point> radial_samples(int dim, double r_min, double r_max, int radii, int angles = 16);

/// Uniform random points in the ball of radius r_max (deterministic in seed).
std::vector<Point> random_samples(int dim, double r_max, int count, unsigned seed);

}  // namespace subfp
