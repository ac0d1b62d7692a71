#pragma once

#include "subfp/evolution.hpp"
#include "subfp/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subfp {

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> distances;
  std::string norm;  // description of the norm used

  size_t size() const { return times.size(); }
};

/// d(t_k) = ||f(t_k) - M(f0) G|| in the given norm.
DecaySeries decay_series(const Trajectory& traj, const Density& G, const NormSpec& spec);

/// Same with explicit per-cell weights: (sum vol |(f - M G)_i w_i|^p)^{1/p}.
DecaySeries decay_series(const Trajectory& traj, const Density& G, double p,
                         const Vector& cell_weights, const std::string& norm_name);

/// Cell weights G^{-1/2}.
Vector inverse_sqrt_weights(const Density& G);

struct FitWindow {
  double t1 = 0.0;
  double t2 = 0.0;
};

struct DecayFit {
  DecayEnvelope envelope;
  double exponent = 0.0;   // beta-hat or lambda-hat
  double intercept = 0.0;  // of the regression line
  FitWindow window;
  double r2 = 0.0;
  int points = 0;
  double max_violation = 0.0;  // max of log d - fitted line over the window
};

/// -slope of log d against log(1+t) over the window.
DecayFit fit_polynomial_rate(const DecaySeries& s, const FitWindow& w);

/// slope of -log d against t^sigma over the window.
DecayFit fit_stretched_rate(const DecaySeries& s, double sigma, const FitWindow& w);

struct WindowOptions {
  double burn_fraction = 0.5;          // start once d <= burn_fraction d(0)
  std::optional<double> spectral_gap;  // end when the local rate is within 20% of it
  double gap_agreement = 0.2;
  double noise_floor = 1e-10;          // end once d < noise_floor d(0)
};

/// Window between the initial transient and the truncated-domain regime.
FitWindow select_window(const DecaySeries& s, const WindowOptions& opt = {});

/// max over k (t_k in window, or all if w is empty) of d(t_k) - C Theta(t_k) d(0).
double envelope_check(const DecaySeries& s, const DecayEnvelope& env, double C,
                      const std::optional<FitWindow>& w = std::nullopt);

/// C such that d(t) = C Theta(t) d(0) at the series point nearest t.
double calibrate_envelope(const DecaySeries& s, const DecayEnvelope& env, double t);

/// Ordinary least squares y = a + b x; returns (a, b, R^2).
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace subfp
