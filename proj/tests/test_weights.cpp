#include "doctest.h"
#include "oracles.hpp"

#include "subfp/force_field.hpp"
#include "subfp/weights.hpp"

#include <cmath>

using namespace subfp;

TEST_CASE("weight families validate their parameters") {
  CHECK_NOTHROW(Weight::polynomial(2.0, 0.5));
  CHECK_THROWS(Weight::polynomial(0.0, 0.5));
  CHECK_THROWS(Weight::stretched(1.0, 0.5, 0.5));  // s must be < gamma
  CHECK_THROWS(Weight::stretched(0.0, 0.3, 0.5));
  CHECK_THROWS(Weight::critical(2.0, 0.5));  // kappa gamma = 1
  CHECK_NOTHROW(Weight::critical(1.9, 0.5));
  CHECK(Weight::critical(0.8, 0.5).s() == 0.5);
  CHECK_THROWS(NormSpec(0.5, Weight::unit()));
  CHECK_THROWS(NormSpec(2.0, Weight::unit(), 1.5));
  CHECK_NOTHROW(NormSpec(kInfinity, Weight::unit(), 0.0));
}

TEST_CASE("weight values") {
  const Point x(3.0, 4.0);
  CHECK(Weight::polynomial(2.0, 0.5).value(x) == doctest::Approx(26.0).epsilon(1e-14));
  CHECK(Weight::stretched(0.7, 0.3, 0.5).value(x) == doctest::Approx(std::exp(0.7 * std::pow(26.0, 0.15))).epsilon(1e-14));
  CHECK(Weight::unit().value(x) == 1.0);
}

TEST_CASE("critical_k") {
  CHECK(critical_k(1.0, 3, 5.0) == 0.0);
  CHECK(critical_k(2.0, 1, 1.0) == doctest::Approx(0.5));
  CHECK(critical_k(kInfinity, 3, 3.0) == doctest::Approx(3.0));
  CHECK(critical_k(3.0, 1, 4.5) == doctest::Approx(4.5 * 2.0 / 3.0));
}

TEST_CASE("critical_sigmas") {
  const auto a = critical_sigmas(ForceCase::case2, 0.5);
  CHECK(a.sigma_L == doctest::Approx(0.25));
  CHECK(a.sigma_B == doctest::Approx(1.0 / 3.0));
  const auto b = critical_sigmas(ForceCase::case1, 0.5);
  CHECK(b.sigma_L == doctest::Approx(1.0 / 3.0));
  CHECK(b.sigma_B == doctest::Approx(1.0 / 3.0));
  const auto c = critical_sigmas(ForceCase::case2, 2.0 / 3.0);
  CHECK(c.sigma_L == doctest::Approx(1.0 / 3.0));
  CHECK(c.sigma_B == doctest::Approx(0.5));
  for (double g = 0.05; g < 1.0; g += 0.05) {
    const auto s = critical_sigmas(ForceCase::case1, g);
    CHECK(s.sigma_L == g / (2.0 - g));
    CHECK(s.sigma_B == g / (2.0 - g));
  }
  CHECK_THROWS(critical_sigmas(ForceCase::case1, 1.0));
}

TEST_CASE("lambda_star") {
  CHECK(lambda_star(1.0, 0.0, 0.5) == doctest::Approx(std::cbrt(0.25)).epsilon(1e-12));
  CHECK(lambda_star(1.0, 0.0, 0.5) == doctest::Approx(0.62996).epsilon(1e-5));
  CHECK(lambda_star(1.999999, 0.3, 0.5) < 1e-2);
  CHECK(lambda_star(1.0, 0.999999, 0.5) < 1e-2);
  CHECK_THROWS(lambda_star(2.0, 0.0, 0.5));
}

TEST_CASE("polynomial_beta_bound") {
  CHECK(polynomial_beta_bound(4.0, 0.0, 0.5) == doctest::Approx(4.0 / 1.5));
  CHECK(polynomial_beta_bound(4.0, 1.0, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS(polynomial_beta_bound(1.0, 2.0, 0.5));
}

TEST_CASE("theta_envelope") {
  CHECK(theta_envelope(DecayEnvelope::polynomial(1.0), 0.0) == 1.0);
  CHECK(theta_envelope(DecayEnvelope::stretched(1.0, 1.0 / 3.0), 8.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(theta_envelope(DecayEnvelope::polynomial(2.0), 9.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS(DecayEnvelope::polynomial(0.0));
  CHECK_THROWS(DecayEnvelope::stretched(1.0, 1.0));
}

TEST_CASE("weighted_lp_norm") {
  const Grid g(1, 10.0, 4096);
  SUBCASE("zero and single cell") {
    CHECK(weighted_lp_norm(Density(g, Vector::Zero(g.size())), NormSpec(1.0, Weight::unit())) == 0.0);
    Vector v = Vector::Zero(g.size());
    v[17] = 1.0;
    CHECK(weighted_lp_norm(Density(g, v), NormSpec(1.0, Weight::unit())) == doctest::Approx(g.cell_volume()));
    CHECK(weighted_lp_norm(Density(g, v), NormSpec(kInfinity, Weight::unit())) == 1.0);
  }
  SUBCASE("quadrature oracle: f = exp(-x^2), m = <x>^2, p = 2") {
    const Density f = Density::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
    // closed form of int e^{-2x^2}(1+x^2)^2 = sqrt(pi/2) (1 + 2/4 + 3/16)
    const double exact = std::sqrt(std::sqrt(M_PI / 2.0) * (1.0 + 0.5 + 3.0 / 16.0));
    const double quad = std::sqrt(oracle::integrate(
        [](double x) { return std::exp(-2 * x * x) * std::pow(1 + x * x, 2); }, -10, 10));
    CHECK(quad == doctest::Approx(exact).epsilon(1e-12));
    CHECK(weighted_lp_norm(f, NormSpec(2.0, Weight::polynomial(2.0, 0.5))) == doctest::Approx(exact).epsilon(1e-4));
  }
  SUBCASE("homogeneity and theta monotonicity") {
    const Density f = Density::sample(g, [](const Point& x) { return std::sin(x[0]) * std::exp(-std::abs(x[0]) / 3); });
    for (const NormSpec& s : {NormSpec(1.0, Weight::polynomial(3.0, 0.5), 0.5), NormSpec(2.0, Weight::critical(1.0, 0.5), 0.9),
                              NormSpec(kInfinity, Weight::stretched(1.0, 0.3, 0.5), 1.0)}) {
      const double n1 = weighted_lp_norm(f, s);
      for (double c : {-3.0, 0.0, 0.25, 7.0})
        CHECK(weighted_lp_norm(f.scaled(c), s) == doctest::Approx(std::abs(c) * n1).epsilon(1e-13));
      double prev = 0.0;
      for (double th = 0.0; th <= 1.0; th += 0.1) {
        const double n = weighted_lp_norm(f, NormSpec(s.p, s.weight, th));
        CHECK(n >= prev * (1 - 1e-14));
        prev = n;
      }
    }
  }
}

TEST_CASE("chi profile") {
  CHECK(chi_quintic(0.0) == 1.0);
  CHECK(chi_quintic(1.0) == 1.0);
  CHECK(chi_quintic(2.0) == 0.0);
  CHECK(chi_quintic(5.0) == 0.0);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    const double c = chi_quintic(r);
    CHECK(c <= prev + 1e-15);
    CHECK(c >= 0.0);
    prev = c;
  }
  // C^1 at both joins
  const double h = 1e-6;
  CHECK(std::abs(chi_quintic(1.0 + h) - 1.0) / h < 1e-4);
  CHECK(std::abs(chi_quintic(2.0 - h)) / h < 1e-4);
  CHECK(chi_R(Point(3.0, 0.0), 2.0) == doctest::Approx(chi_quintic(1.5)));
}

namespace {

// psi0 rebuilt from finite differences of m and of F.
double psi0_fd(const Weight& w, double p, const ForceField& f, const Point& x) {
  const int d = f.dim();
  const double h = 1e-4 * bracket(x);
  const double m = w.value(x);
  double lap = 0.0, div = 0.0;
  Point grad = Point::Zero();
  for (int k = 0; k < d; ++k) {
    const Point e = k == 0 ? Point(h, 0) : Point(0, h);
    const double mp = w.value(x + e), mm = w.value(x - e);
    grad[k] = (mp - mm) / (2 * h);
    lap += (mp - 2 * m + mm) / (h * h);
    div += (f.force(x + e)[k] - f.force(x - e)[k]) / (2 * h);
  }
  const double ic = 1.0 - 1.0 / p;
  return (2 - p) / p * lap / m + 2 * ic * grad.squaredNorm() / (m * m) + ic * div - f.force(x).dot(grad) / m;
}

}  // namespace

TEST_CASE("psi0 closed form matches finite differences") {
  const ForceField f1 = canonical_gradient_field(0.5, 1.0, 1);
  const ForceField f2 = rotated_field(canonical_gradient_field(0.5, 1.0, 2), 1.0);
  const std::vector<Weight> ws{Weight::polynomial(2.0, 0.5), Weight::polynomial(4.0, 0.5),
                              Weight::stretched(1.0, 0.3, 0.5), Weight::critical(0.8, 0.5)};
  for (const ForceField* f : {&f1, &f2})
    for (const Weight& w : ws)
      for (double p : {1.0, 1.5, 2.0, 4.0})
        for (const Point& x0 : random_samples(f->dim(), 20.0, 25, 5)) {
          const Point x = f->dim() == 1 ? Point(x0[0], 0.0) : x0;
          const double a = psi0(w, p, *f, x, 0.0, 1.0), b = psi0_fd(w, p, *f, x);
          CHECK(std::abs(a - b) <= 1e-5 * std::max(1.0, std::abs(a)) + 1e-6);
        }
}

TEST_CASE("psi0 asymptotics") {
  const ForceField f = canonical_gradient_field(0.5, 1.0, 1);
  // 1D canonical: div F ~ (gamma - 1)|x|^{gamma-2}, so C_F = -1/2 along the ray and
  // the limit is (1 - 1/p) C_F - k = -0.25 - 2 for m = <x>^2, p = 2.
  for (double r : {1e4, 1e6, 1e8}) {
    const double v = psi0(Weight::polynomial(2.0, 0.5), 2.0, f, Point(r, 0), 0.0, 1.0) * std::pow(r, 1.5);
    CHECK(v == doctest::Approx(-2.25).epsilon(5.0 / std::sqrt(r)));
  }
  // m = exp(kappa <x>^gamma): limit of psi0 |x|^{2-2gamma} is (kappa gamma)^2 - kappa gamma
  const double kg = 0.8 * 0.5;
  for (double r : {1e6, 1e8}) {
    const double v = psi0(Weight::critical(0.8, 0.5), 2.0, f, Point(r, 0), 0.0, 1.0) * std::pow(r, 1.0);
    CHECK(v == doctest::Approx(kg * kg - kg).epsilon(1e-2));
  }
  CHECK(psi0_asymptotic_constant(Weight::polynomial(2.0, 0.5), 2.0, f) == doctest::Approx(2.25).epsilon(1e-4));
  CHECK(psi0_asymptotic_constant(Weight::critical(0.8, 0.5), 2.0, f) == doctest::Approx(kg - kg * kg).epsilon(1e-4));
}

TEST_CASE("psi0 and psi_star absorption term") {
  const ForceField f = canonical_gradient_field(0.5, 1.0, 1);
  const Weight w = Weight::polynomial(2.0, 0.5);
  const Point x(0.7, 0.0);
  CHECK(psi0(w, 1.5, f, x, 0.0, 1.0) == psi0(w, 1.5, f, x, 0.0, 50.0));
  CHECK(psi0(w, 1.5, f, x, 3.0, 1.0) == doctest::Approx(psi0(w, 1.5, f, x, 0.0, 1.0) - 3.0));
  CHECK(psi_star(w, 2.0, f, x, 1e12, 5.0) < -1e11);
  // p = 2: the Laplacian terms vanish in both functionals, leaving the same expression
  for (double r : {0.3, 2.0, 40.0}) {
    const Point y(r, 0.0);
    CHECK(psi_star(w, 2.0, f, y, 0.0, 1.0) == doctest::Approx(psi0(w, 2.0, f, y, 0.0, 1.0)).epsilon(1e-13));
  }
  // adjoint functional for m0 = exp(kappa <x>^gamma) is negative at large |x|
  const Weight m0 = Weight::critical(0.5, 0.5);
  for (double r : {50.0, 1e3, 1e5}) CHECK(psi_star(m0, 1.5, f, Point(r, 0), 0.0, 1.0) < 0.0);
  CHECK_THROWS(psi0(w, kInfinity, f, x, 0.0, 1.0));
}
