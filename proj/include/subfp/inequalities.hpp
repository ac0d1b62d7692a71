#pragma once

#include "subfp/decay.hpp"
#include "subfp/evolution.hpp"
#include "subfp/force_field.hpp"

#include <functional>
#include <string>
#include <vector>

namespace subfp {

/// Logarithmic mean (a - b)/(log a - log b), a, b > 0.
double log_mean(double a, double b);

enum class PoincareWeight { bracket, unit };

/// Smallest mu with sum_faces w (u_j - u_i)^2 >= mu sum vol u^2 rho G over
/// {sum vol u G = 0}, where rho = <x>^{2 gamma - 2} (bracket) or 1 (unit) and the
/// face weight matches the generator's flux for f = u G.
double weak_poincare_constant(const Density& G, double gamma,
                              PoincareWeight right = PoincareWeight::bracket);

struct LyapunovReport {
  double max_violation = 0.0;
  Point worst = Point::Zero();
};

/// max over samples of Lap w - grad V . grad w - w (-zeta0 <x>^{2(gamma-1)} + M chi_R).
/// grad V is the field's potential gradient when attached, otherwise F itself.
/// Derivatives of w use fourth-order central differences.
LyapunovReport lyapunov_check(const ForceField& field, const ScalarMap& w, double zeta0, double M,
                              double R, const std::vector<Point>& samples);

using Convex = std::function<double(double)>;

Convex entropy_square();
Convex entropy_abs();
Convex entropy_excess(double c);

struct EntropySeries {
  std::vector<double> times;
  std::vector<double> values;
  double max_increase = 0.0;  // max_k H(t_{k+1}) - H(t_k)
  bool monotone = false;      // max_increase <= 1e-9 H(0)
};

EntropySeries entropy_series(const Trajectory& traj, const Density& G, const Convex& j);

/// ||g||_2^2 / ((int |grad g|^2)^{d/(d+2)} (int |g|)^{4/(d+2)}).
double nash_quotient(const Density& g);

struct InterpolationReport {
  double alpha = 2.0;
  double C_alpha = 0.0;       // max over snapshots of E1 / (E0^{1/a} E2^{1-1/a})
  double ratio_spread = 0.0;  // max / min of that ratio
  double max_differential_violation = 0.0;  // max of [dE1^2/dt + 2 mu E0^2] / (2 mu E0^2)
  double envelope_constant = 0.0;  // max over t > 0 of E1(t) t^{1/(a-1)} / E2(0)
  std::vector<double> E0, E1, E2;
};

/// E0 = ||f G^{-1/2} <x>^{gamma-1}||_2, E1 = ||f G^{-1/2}||_2, E2 = max |f|/G.
/// Snapshots after E1 first drops below 1e-10 E1(0) are ignored.
InterpolationReport interpolation_chain_check(const Trajectory& traj, const Density& G,
                                              double gamma, double alpha, double mu);

/// Scan alpha and keep the value whose ratio is most nearly constant.
InterpolationReport best_interpolation_alpha(const Trajectory& traj, const Density& G,
                                             double gamma, const std::vector<double>& alphas,
                                             double mu);

}  // namespace subfp
