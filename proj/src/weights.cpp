#include "subfp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subfp {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("weight: gamma must lie in (0,1)");
}

}  // namespace

Weight Weight::unit() { return Weight(); }

Weight Weight::polynomial(double k, double gamma) {
  check_gamma(gamma);
  if (!(k > 0.0)) throw std::invalid_argument("polynomial weight: k must be positive");
  Weight w;
  w.family_ = WeightFamily::polynomial;
  w.k_ = k;
  w.gamma_ = gamma;
  return w;
}

Weight Weight::stretched(double kappa, double s, double gamma) {
  check_gamma(gamma);
  if (!(kappa > 0.0)) throw std::invalid_argument("stretched weight: kappa must be positive");
  if (!(s > 0.0 && s < gamma))
    throw std::invalid_argument("stretched weight: need 0 < s < gamma");
  Weight w;
  w.family_ = WeightFamily::stretched;
  w.kappa_ = kappa;
  w.s_ = s;
  w.gamma_ = gamma;
  return w;
}

Weight Weight::critical(double kappa, double gamma) {
  check_gamma(gamma);
  if (!(kappa > 0.0 && kappa * gamma < 1.0))
    throw std::invalid_argument("critical weight: need 0 < kappa < 1/gamma");
  Weight w;
  w.family_ = WeightFamily::critical;
  w.kappa_ = kappa;
  w.s_ = gamma;
  w.gamma_ = gamma;
  return w;
}

double Weight::log_value(const Point& x) const {
  switch (family_) {
    case WeightFamily::unit:
      return 0.0;
    case WeightFamily::polynomial:
      return 0.5 * k_ * std::log1p(x.squaredNorm());
    default:
      return kappa_ * std::pow(bracket(x), s_);
  }
}

Point Weight::log_gradient(const Point& x, int) const {
  const double b = bracket(x);
  switch (family_) {
    case WeightFamily::unit:
      return Point::Zero();
    case WeightFamily::polynomial:
      return k_ * x / (b * b);
    default:
      return kappa_ * s_ * std::pow(b, s_ - 2.0) * x;
  }
}

double Weight::laplacian_ratio(const Point& x, int dim) const {
  const double b = bracket(x);
  const double r2 = x.squaredNorm();
  double lap_log = 0.0;
  switch (family_) {
    case WeightFamily::unit:
      return 0.0;
    case WeightFamily::polynomial:
      lap_log = k_ * (dim / (b * b) - 2.0 * r2 / (b * b * b * b));
      break;
    default:
      lap_log = kappa_ * s_ * (dim * std::pow(b, s_ - 2.0) + (s_ - 2.0) * r2 * std::pow(b, s_ - 4.0));
      break;
  }
  return lap_log + log_gradient(x, dim).squaredNorm();
}

std::string Weight::family_name() const {
  switch (family_) {
    case WeightFamily::unit: return "unit";
    case WeightFamily::polynomial: return "polynomial";
    case WeightFamily::stretched: return "stretched";
    case WeightFamily::critical: return "critical";
  }
  return "unit";
}

NormSpec::NormSpec(double p_, Weight w, double theta_) : p(p_), weight(w), theta(theta_) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm: p must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("norm: theta must lie in [0,1]");
}

DecayEnvelope DecayEnvelope::polynomial(double beta, double valid_from) {
  if (!(beta > 0.0)) throw std::invalid_argument("envelope: beta must be positive");
  DecayEnvelope e;
  e.kind = Kind::polynomial;
  e.beta = beta;
  e.valid_from = valid_from;
  return e;
}

DecayEnvelope DecayEnvelope::stretched(double lambda, double sigma, double valid_from) {
  if (!(lambda > 0.0)) throw std::invalid_argument("envelope: lambda must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("envelope: sigma must lie in (0,1)");
  DecayEnvelope e;
  e.kind = Kind::stretched;
  e.lambda = lambda;
  e.sigma = sigma;
  e.valid_from = valid_from;
  return e;
}

double critical_k(double p, int d, double C_F) {
  if (!(p >= 1.0)) throw std::invalid_argument("critical_k: p must be >= 1");
  // 1/p' = 1 - 1/p; p = 1 gives p' = inf, p = inf gives p' = 1
  const double inv_conj = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  return std::max(static_cast<double>(d), C_F) * inv_conj;
}

CriticalSigmas critical_sigmas(ForceCase c, double gamma) {
  check_gamma(gamma);
  const double sb = gamma / (2.0 - gamma);
  if (c == ForceCase::case1) return {sb, sb};
  return {1.0 / std::floor(2.0 / gamma), sb};
}

double lambda_star(double kappa, double theta, double gamma) {
  check_gamma(gamma);
  if (!(kappa > 0.0 && kappa * gamma < 1.0))
    throw std::invalid_argument("lambda_star: need 0 < kappa*gamma < 1");
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("lambda_star: theta in [0,1)");
  const double kg = kappa * gamma;
  return std::pow(kappa * (1.0 - theta), (2.0 - 2.0 * gamma) / (2.0 - gamma)) *
         std::pow(kg * (1.0 - kg), gamma / (2.0 - gamma));
}

double polynomial_beta_bound(double k, double k_star, double gamma, double theta) {
  if (!(k > k_star)) throw std::invalid_argument("polynomial_beta_bound: need k > k*");
  if (theta > k_star / k) return k * (1.0 - theta) / (2.0 - gamma);
  return (k - k_star) / (2.0 - gamma);
}

double theta_envelope(const DecayEnvelope& env, double t) {
  if (t < 0.0) throw std::invalid_argument("theta_envelope: t must be >= 0");
  if (env.kind == DecayEnvelope::Kind::polynomial) return std::pow(1.0 + t, -env.beta);
  return std::exp(-env.lambda * std::pow(t, env.sigma));
}

double weighted_lp_norm(const Density& f, double p, const Vector& w) {
  if (w.size() != f.size()) throw std::invalid_argument("weighted_lp_norm: weight size mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
  const Vector& v = f.values();
  if (std::isinf(p)) return (v.array() * w.array()).abs().maxCoeff();
  const double vol = f.grid().cell_volume();
  double acc = 0.0;
  if (p == 1.0) {
    acc = (v.array() * w.array()).abs().sum();
    return vol * acc;
  }
  if (p == 2.0) {
    acc = (v.array() * w.array()).square().sum();
    return std::sqrt(vol * acc);
  }
  for (int i = 0; i < f.size(); ++i) acc += std::pow(std::abs(v[i] * w[i]), p);
  return std::pow(vol * acc, 1.0 / p);
}

double weighted_lp_norm(const Density& f, const NormSpec& spec) {
  const Grid& g = f.grid();
  Vector w(g.size());
  for (int i = 0; i < g.size(); ++i) w[i] = std::exp(spec.theta * spec.weight.log_value(g.center(i)));
  return weighted_lp_norm(f, spec.p, w);
}

double chi_quintic(double rho) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  const double t = rho - 1.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

namespace {

struct WeightTerms {
  double lap_ratio;
  double grad_sq;
  double div_f;
  double drift;
};

WeightTerms terms(const Weight& w, const ForceField& field, const Point& x) {
  const int d = field.dim();
  const Point g = w.log_gradient(x, d);
  return {w.laplacian_ratio(x, d), g.squaredNorm(), field.divergence(x), field.force(x).dot(g)};
}

}  // namespace

double psi0(const Weight& weight, double p, const ForceField& field, const Point& x, double M,
            double R) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("psi0: p must lie in [1,inf)");
  const WeightTerms t = terms(weight, field, x);
  const double inv_conj = 1.0 - 1.0 / p;
  const double absorb = M > 0.0 ? M * chi_R(x, R) : 0.0;
  return (2.0 - p) / p * t.lap_ratio + 2.0 * inv_conj * t.grad_sq + inv_conj * t.div_f - t.drift -
         absorb;
}

double psi_star(const Weight& weight, double p, const ForceField& field, const Point& x, double M,
                double R) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("psi_star: p must lie in [1,inf)");
  const WeightTerms t = terms(weight, field, x);
  const double absorb = M > 0.0 ? M * chi_R(x, R) : 0.0;
  return (p - 2.0) / p * t.lap_ratio + 2.0 / p * t.grad_sq + t.div_f / p - t.drift - absorb;
}

double psi0_asymptotic_constant(const Weight& weight, double p, const ForceField& field,
                                double radius) {
  const double gamma = field.gamma();
  const double expo = 2.0 - gamma - weight.s();
  const int directions = field.dim() == 1 ? 2 : 16;
  double a_star = kInfinity;
  for (int k = 0; k < directions; ++k) {
    Point x;
    if (field.dim() == 1) {
      x = Point(k == 0 ? radius : -radius, 0.0);
    } else {
      const double phi = 2.0 * M_PI * k / directions;
      x = Point(radius * std::cos(phi), radius * std::sin(phi));
    }
    a_star = std::min(a_star, -psi0(weight, p, field, x, 0.0, 1.0) * std::pow(radius, expo));
  }
  return a_star;
}

}  // namespace subfp
