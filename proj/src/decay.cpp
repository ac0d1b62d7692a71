#include "subfp/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace subfp {

namespace {

void check_shared_grid(const Trajectory& traj, const Density& G) {
  if (traj.densities.empty()) throw std::invalid_argument("decay_series: empty trajectory");
  if (traj.densities.front().grid() != G.grid())
    throw std::invalid_argument("decay_series: trajectory and G live on different grids");
}

bool in_window(double t, const FitWindow& w) {
  const double slack = 1e-12 * std::max(1.0, std::abs(w.t2));
  return t >= w.t1 - slack && t <= w.t2 + slack;
}

DecayFit fit_generic(const DecaySeries& s, const FitWindow& w,
                     const std::function<double(double)>& abscissa) {
  if (!(w.t2 > w.t1)) throw std::invalid_argument("decay fit: empty window");
  std::vector<double> x, y;
  for (size_t k = 0; k < s.size(); ++k) {
    if (!in_window(s.times[k], w)) continue;
    if (!(s.distances[k] > 0.0)) {
      std::ostringstream msg;
      msg << "decay fit: nonpositive distance at t = " << s.times[k];
      throw std::invalid_argument(msg.str());
    }
    x.push_back(abscissa(s.times[k]));
    y.push_back(std::log(s.distances[k]));
  }
  if (x.size() < 8) {
    std::ostringstream msg;
    msg << "decay fit: need at least 8 points in the window, got " << x.size();
    throw std::invalid_argument(msg.str());
  }
  const LineFit lf = least_squares(x, y);
  DecayFit fit;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  fit.window = w;
  fit.points = static_cast<int>(x.size());
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < x.size(); ++k)
    fit.max_violation = std::max(fit.max_violation, y[k] - (lf.intercept + lf.slope * x[k]));
  fit.exponent = -lf.slope;
  return fit;
}

}  // namespace

DecaySeries decay_series(const Trajectory& traj, const Density& G, const NormSpec& spec) {
  check_shared_grid(traj, G);
  const double m0 = traj.densities.front().mass();
  DecaySeries s;
  s.times = traj.times;
  std::ostringstream name;
  name << "L^" << spec.p << "(" << spec.weight.family_name() << "^" << spec.theta << ")";
  s.norm = name.str();
  for (const Density& f : traj.densities) s.distances.push_back(weighted_lp_norm(f - G.scaled(m0), spec));
  return s;
}

DecaySeries decay_series(const Trajectory& traj, const Density& G, double p,
                         const Vector& cell_weights, const std::string& norm_name) {
  check_shared_grid(traj, G);
  const double m0 = traj.densities.front().mass();
  DecaySeries s;
  s.times = traj.times;
  s.norm = norm_name;
  for (const Density& f : traj.densities)
    s.distances.push_back(weighted_lp_norm(f - G.scaled(m0), p, cell_weights));
  return s;
}

Vector inverse_sqrt_weights(const Density& G) {
  if (!(G.min() > 0.0)) throw std::invalid_argument("inverse_sqrt_weights: G must be positive");
  return G.values().array().rsqrt();
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares: need matching samples");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("least_squares: degenerate abscissae");
  LineFit lf;
  lf.slope = sxy / sxx;
  lf.intercept = my - lf.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - lf.intercept - lf.slope * x[i];
    ss_res += r * r;
  }
  lf.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
  return lf;
}

DecayFit fit_polynomial_rate(const DecaySeries& s, const FitWindow& w) {
  DecayFit fit = fit_generic(s, w, [](double t) { return std::log1p(t); });
  fit.envelope.kind = DecayEnvelope::Kind::polynomial;
  fit.envelope.beta = fit.exponent;
  fit.envelope.valid_from = w.t1;
  return fit;
}

DecayFit fit_stretched_rate(const DecaySeries& s, double sigma, const FitWindow& w) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("fit_stretched_rate: sigma in (0,1)");
  DecayFit fit = fit_generic(s, w, [sigma](double t) { return std::pow(t, sigma); });
  fit.envelope.kind = DecayEnvelope::Kind::stretched;
  fit.envelope.lambda = fit.exponent;
  fit.envelope.sigma = sigma;
  fit.envelope.valid_from = w.t1;
  return fit;
}

FitWindow select_window(const DecaySeries& s, const WindowOptions& opt) {
  if (s.size() < 2) throw std::invalid_argument("select_window: series too short");
  const double d0 = s.distances.front();
  if (!(d0 > 0.0)) throw std::invalid_argument("select_window: d(0) must be positive");
  size_t start = s.size() - 1;
  for (size_t k = 1; k < s.size(); ++k) {
    if (s.distances[k] <= opt.burn_fraction * d0) {
      start = k;
      break;
    }
  }
  size_t end = s.size() - 1;
  for (size_t k = start; k + 1 < s.size(); ++k) {
    if (!(s.distances[k + 1] >= opt.noise_floor * d0)) {
      end = k;
      break;
    }
    if (opt.spectral_gap) {
      const double gap = *opt.spectral_gap;
      const double rate = -(std::log(s.distances[k + 1]) - std::log(s.distances[k])) /
                          (s.times[k + 1] - s.times[k]);
      if (std::abs(rate - gap) <= opt.gap_agreement * gap) {
        end = k;
        break;
      }
    }
  }
  return {s.times[start], s.times[std::max(start, end)]};
}

double envelope_check(const DecaySeries& s, const DecayEnvelope& env, double C,
                      const std::optional<FitWindow>& w) {
  if (!(C > 0.0)) throw std::invalid_argument("envelope_check: C must be positive");
  if (s.size() == 0) throw std::invalid_argument("envelope_check: empty series");
  const double d0 = s.distances.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < s.size(); ++k) {
    if (w && !in_window(s.times[k], *w)) continue;
    worst = std::max(worst, s.distances[k] - C * theta_envelope(env, s.times[k]) * d0);
  }
  return worst;
}

double calibrate_envelope(const DecaySeries& s, const DecayEnvelope& env, double t) {
  if (s.size() == 0) throw std::invalid_argument("calibrate_envelope: empty series");
  size_t best = 0;
  for (size_t k = 1; k < s.size(); ++k)
    if (std::abs(s.times[k] - t) < std::abs(s.times[best] - t)) best = k;
  return s.distances[best] / (theta_envelope(env, s.times[best]) * s.distances.front());
}

}  // namespace subfp
