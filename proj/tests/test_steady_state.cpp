#include "doctest.h"
#include "oracles.hpp"

#include "subfp/evolution.hpp"
#include "subfp/force_field.hpp"
#include "subfp/inequalities.hpp"
#include "subfp/steady_state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

using namespace subfp;

namespace {

// e^{-V(x_i)} / Z_h with Z_h the discrete mass, from the formula alone.
Vector exact_equilibrium(const Grid& g, double gamma, double scale = 1.0) {
  Vector e(g.size());
  for (int i = 0; i < g.size(); ++i) e[i] = std::exp(-oracle::canonical_V(g.center(i).norm(), gamma, scale));
  return e / (g.cell_volume() * e.sum());
}

double max_rel_err(const Vector& a, const Vector& b) {
  return ((a - b).array() / b.array()).abs().maxCoeff();
}

}  // namespace

TEST_CASE("solve_steady: closed-form oracles") {
  SUBCASE("canonical 1D") {
    const Grid g(1, 50.0, 2048);
    const Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
    const Density G = solve_steady(gen);
    CHECK(max_rel_err(G.values(), exact_equilibrium(g, 0.5)) <= 1e-8);
    CHECK(G.mass() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(G.min() > 0.0);
    CHECK(steady_residual(gen, G) <= 1e-10);
  }
  SUBCASE("scale s reproduces e^{-sV}") {
    const Grid g(1, 30.0, 1024);
    const Generator gen = build_generator(g, canonical_gradient_field(0.4, 2.5, 1));
    CHECK(max_rel_err(solve_steady(gen).values(), exact_equilibrium(g, 0.4, 2.5)) <= 1e-8);
  }
  SUBCASE("rotated 2D, 64^2") {
    const Grid g(2, 30.0, 64);
    const Generator gen = build_generator(g, rotated_field(canonical_gradient_field(0.5, 1.0, 2), 1.0));
    CHECK(max_rel_err(solve_steady(gen).values(), exact_equilibrium(g, 0.5)) <= 1e-6);
  }
  SUBCASE("zero field") {
    for (int dim : {1, 2}) {
      const Grid g(dim, 4.0, 16);
      const Density G = solve_steady(build_generator(g, zero_field(dim)));
      const double expect = 1.0 / std::pow(8.0, dim);
      CHECK((G.values().array() - expect).abs().maxCoeff() <= 1e-12 * expect);
    }
  }
}

TEST_CASE("solve_steady: uniqueness from random seeds") {
  const Grid g(2, 15.0, 32);
  const Generator gen = build_generator(g, rotated_field(canonical_gradient_field(0.5, 1.0, 2), 0.8, linear_modulation(0.3)));
  const Density ref = solve_steady(gen);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto r = oracle::uniform(g.size(), 0.1, 10.0, seed);
    const Vector s = Eigen::Map<const Vector>(r.data(), g.size());
    const Density G = solve_steady(gen, {}, &s);
    CHECK(g.cell_volume() * (G.values() - ref.values()).lpNorm<1>() <= 1e-8);
  }
}

TEST_CASE("long-time integration agrees with the null vector") {
  const Grid g(1, 20.0, 256);
  const Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
  const Density G = solve_steady(gen);
  const Density f0 = Density::sample(g, [](const Point& x) { return std::exp(-(x[0] - 3) * (x[0] - 3)); });
  const std::vector<double> times{0.0, 1e5};
  const Trajectory tr = evolve(f0.scaled(1.0 / f0.mass()), times, gen.matrix);
  CHECK(g.cell_volume() * (tr.densities.back().values() - G.values()).lpNorm<1>() <= 1e-6);
}

TEST_CASE("tail_bound_check") {
  const Grid g(1, 50.0, 2048);
  const Density G = solve_steady(build_generator(g, canonical_gradient_field(0.5, 1.0, 1)));
  // G ~ e^{-2<x>^{1/2}}: bounded against any kappa < 2
  CHECK(tail_bound_check(G, 1.5, 0.5).pass);
  CHECK(tail_bound_check(G, 1.9, 0.5).pass);
  CHECK_THROWS(tail_bound_check(G, 2.5, 0.5));
  const Density flat = solve_steady(build_generator(g, zero_field(1)));
  CHECK_FALSE(tail_bound_check(flat, 1.9, 0.5).pass);
}

TEST_CASE("rightmost_spectrum against a dense solver") {
  const Grid g(1, 25.0, 256);
  const Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
  const Density G = solve_steady(gen);
  const SpectrumReport s = rightmost_spectrum(gen, 5, &G);
  CHECK(s.pass);
  CHECK(s.simple_zero);
  CHECK(s.zero_multiplicity == 1);
  CHECK(std::abs(s.eigenvalues[0]) <= 1e-10);
  CHECK(s.null_vector_error <= 1e-8);
  for (double r : s.residuals) CHECK(r <= 1e-8);

  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(gen.matrix), false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + g.size());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() > b.real(); });
  CHECK(std::abs(ev[0]) <= 1e-10);
  for (int k = 1; k < 5; ++k) {
    CHECK(std::abs(s.eigenvalues[k].imag()) <= 1e-10);  // gradient field: real spectrum
    CHECK(s.eigenvalues[k].real() < 0.0);
    CHECK(s.eigenvalues[k].real() == doctest::Approx(ev[k].real()).epsilon(1e-8));
  }
}

TEST_CASE("rightmost_spectrum: non-gradient 2D field") {
  const Grid g(2, 15.0, 24);
  const Generator gen = build_generator(g, rotated_field(canonical_gradient_field(0.5, 1.0, 2), 1.0));
  const Density G = solve_steady(gen);
  const SpectrumReport s = rightmost_spectrum(gen, 6, &G);
  CHECK(s.pass);
  CHECK(s.zero_multiplicity == 1);
  CHECK(s.max_other_real < -1e-10);
  bool complex_pair = false;
  for (const auto& z : s.eigenvalues) complex_pair = complex_pair || std::abs(z.imag()) > 1e-6;
  CHECK(complex_pair);

  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(gen.matrix), false);
  double second = -INFINITY;
  int near_zero = 0;
  for (int k = 0; k < g.size(); ++k) {
    const auto z = es.eigenvalues()[k];
    if (std::abs(z) <= 1e-9) ++near_zero;
    else second = std::max(second, z.real());
  }
  CHECK(near_zero == 1);
  CHECK(s.max_other_real == doctest::Approx(second).epsilon(1e-7));
}

TEST_CASE("spectral gap equals the unit-weight Poincare constant for a gradient field") {
  // reversible case: the generator is self-adjoint in L^2(G^{-1}), so both are the
  // same Rayleigh quotient
  const Grid g(1, 30.0, 600);
  const Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
  const Density G = solve_steady(gen);
  const SpectrumReport s = rightmost_spectrum(gen, 3, &G);
  CHECK(-s.eigenvalues[1].real() == doctest::Approx(weak_poincare_constant(G, 0.5, PoincareWeight::unit)).epsilon(1e-7));
}

TEST_CASE("spectral gap shrinks as the domain grows") {
  double prev = INFINITY;
  for (double L : {25.0, 50.0, 100.0}) {
    const Grid g(1, L, static_cast<int>(8 * L));
    const Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
    const double gap = -rightmost_spectrum(gen, 3).eigenvalues[1].real();
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("tail_mass_fraction") {
  const Grid g(1, 10.0, 200);
  const Density flat = solve_steady(build_generator(g, zero_field(1)));
  CHECK(tail_mass_fraction(flat) == doctest::Approx(0.1).epsilon(1e-12));
  const Density G = solve_steady(build_generator(Grid(1, 100.0, 4096), canonical_gradient_field(0.5, 1.0, 1)));
  CHECK(tail_mass_fraction(G) < 1e-6);
}
