#pragma once

#include "subfp/force_field.hpp"
#include "subfp/grid.hpp"
#include "subfp/types.hpp"

#include <functional>
#include <limits>
#include <string>

namespace subfp {

enum class WeightFamily { unit, polynomial, stretched, critical };

/// Weight functions m(x):
///   polynomial  <x>^k                      k > 0
///   stretched   exp(kappa <x>^s)           kappa > 0, 0 < s < gamma
///   critical    exp(kappa <x>^gamma)       0 < kappa < 1/gamma
///   unit        m == 1
class Weight {
public:
  static Weight unit();
  static Weight polynomial(double k, double gamma);
  static Weight stretched(double kappa, double s, double gamma);
  static Weight critical(double kappa, double gamma);

  WeightFamily family() const { return family_; }
  double k() const { return k_; }
  double kappa() const { return kappa_; }
  /// Stretching exponent s (gamma for the critical family, 0 otherwise).
  double s() const { return s_; }
  double gamma() const { return gamma_; }

  double log_value(const Point& x) const;
  double value(const Point& x) const { return std::exp(log_value(x)); }
  /// grad m / m.
  Point log_gradient(const Point& x, int dim) const;
  /// Laplacian(m) / m.
  double laplacian_ratio(const Point& x, int dim) const;

  std::string family_name() const;

private:
  WeightFamily family_ = WeightFamily::unit;
  double k_ = 0.0;
  double kappa_ = 0.0;
  double s_ = 0.0;
  double gamma_ = 0.5;
};

/// Norm ||f m^theta||_{L^p}; p may be +infinity.
struct NormSpec {
  double p = 1.0;
  Weight weight = Weight::unit();
  double theta = 1.0;

  NormSpec() = default;
  NormSpec(double p_, Weight w, double theta_ = 1.0);
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct DecayEnvelope {
  enum class Kind { polynomial, stretched };
  Kind kind = Kind::polynomial;
  double beta = 1.0;
  double lambda = 1.0;
  double sigma = 0.5;
  double valid_from = 0.0;

  static DecayEnvelope polynomial(double beta, double valid_from = 0.0);
  static DecayEnvelope stretched(double lambda, double sigma, double valid_from = 0.0);
};

enum class ForceCase { case1, case2 };

struct CriticalSigmas {
  double sigma_L;
  double sigma_B;
};

/// k* = max(d, C_F) / p' with p' the conjugate exponent.
double critical_k(double p, int d, double C_F);

CriticalSigmas critical_sigmas(ForceCase c, double gamma);

/// Admissible stretched-exponential rate bound for the critical weight.
double lambda_star(double kappa, double theta, double gamma);

/// Upper end of the admissible polynomial rate range for <x>^k: (k - k*)/(2 - gamma),
/// or k(1 - theta)/(2 - gamma) when theta > k*/k.
double polynomial_beta_bound(double k, double k_star, double gamma, double theta = 0.0);

/// Envelope value (1+t)^{-beta} or exp(-lambda t^sigma).
double theta_envelope(const DecayEnvelope& env, double t);

double weighted_lp_norm(const Density& f, const NormSpec& spec);

/// (sum_i vol |f_i w_i|^p)^{1/p} with explicit per-cell weights.
double weighted_lp_norm(const Density& f, double p, const Vector& cell_weights);

/// Smooth cutoff profile: 1 on [0,1], quintic descent on [1,2], 0 beyond.
double chi_quintic(double rho);

using ChiProfile = std::function<double(double)>;

/// chi_R(x) = profile(|x| / R).
inline double chi_R(const Point& x, double R, const ChiProfile& profile = chi_quintic) {
  return profile(x.norm() / R);
}

/// Pointwise dissipativity functional for B in L^p(m).
double psi0(const Weight& weight, double p, const ForceField& field, const Point& x, double M,
            double R);

/// Pointwise functional for the adjoint operator in L^p(m0).
double psi_star(const Weight& weight, double p, const ForceField& field, const Point& x, double M,
                double R);

/// a* = -lim_{|x|->inf} psi0(x; M=0) |x|^{2-gamma-s}, worst direction, evaluated at
/// radius `radius`.
double psi0_asymptotic_constant(const Weight& weight, double p, const ForceField& field,
                                double radius = 1e10);

}  // namespace subfp
