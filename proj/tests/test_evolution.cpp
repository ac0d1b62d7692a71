#include "doctest.h"
#include "oracles.hpp"

#include "subfp/evolution.hpp"
#include "subfp/force_field.hpp"
#include "subfp/splitting.hpp"
#include "subfp/steady_state.hpp"

#include <cmath>

using namespace subfp;

namespace {

struct Setup {
  Grid grid;
  Generator gen;
  Density G;
};

Setup canonical_1d(double L = 20.0, int n = 400) {
  const Grid g(1, L, n);
  Generator gen = build_generator(g, canonical_gradient_field(0.5, 1.0, 1));
  Density G = solve_steady(gen);
  return {g, std::move(gen), std::move(G)};
}

Density bump(const Grid& g, double x0, double w = 1.0) {
  return Density::sample(g, [&](const Point& x) { return std::exp(-(x - Point(x0, 0)).squaredNorm() / (2 * w * w)); });
}

}  // namespace

TEST_CASE("step_implicit") {
  const Setup s = canonical_1d();
  SUBCASE("G is a fixed point") {
    for (double dt : {1e-3, 1.0, 1e4}) {
      const Density f = step_implicit(s.G, dt, s.gen.matrix);
      CHECK((f.values() - s.G.values()).lpNorm<Eigen::Infinity>() <= 1e-11 * s.G.values().maxCoeff());
    }
  }
  SUBCASE("nonnegative data stay nonnegative at dt = 10") {
    const auto r = oracle::uniform(s.grid.size(), 0.0, 1.0, 5);
    const Density f(s.grid, Eigen::Map<const Vector>(r.data(), s.grid.size()));
    CHECK(step_implicit(f, 10.0, s.gen.matrix).min() >= -1e-14);
  }
  SUBCASE("S_B absorbs mass from data supported in B_R") {
    const SplitPair sp = split_generator(s.gen, 2.0, 3.0);
    Density f = Density::sample(s.grid, [](const Point& x) { return x.norm() < 2.5 ? 1.0 : 0.0; });
    for (int k = 0; k < 5; ++k) {
      const Density next = step_implicit(f, 0.1, sp.B);
      CHECK(next.mass() < f.mass());
      f = next;
    }
  }
}

TEST_CASE("evolve: invariants") {
  const Setup s = canonical_1d();
  SUBCASE("equilibrium stays put") {
    const auto times = geometric_times(0.01, 1e3);
    const Trajectory tr = evolve(s.G, times, s.gen.matrix);
    for (const Density& f : tr.densities)
      CHECK((f.values() - s.G.values()).lpNorm<Eigen::Infinity>() <= 1e-9 * s.G.values().maxCoeff());
  }
  SUBCASE("mass and positivity over many steps") {
    const Density f0 = bump(s.grid, 3.0);
    EvolveOptions opt;
    opt.dt_initial = 1e-3;
    opt.dt_growth = 1.0;
    const std::vector<double> times{0.0, 1.0};  // 1000 steps
    const Trajectory tr = evolve(f0, times, s.gen.matrix, opt);
    CHECK(tr.steps >= 1000);
    for (const Density& f : tr.densities) {
      CHECK(std::abs(f.mass() - f0.mass()) <= 1e-12 * f0.mass());
      CHECK(f.min() >= -1e-14);
    }
  }
  SUBCASE("mean-zero data contract in L^1") {
    const Density b = bump(s.grid, 2.0);
    const Density f0 = b - s.G.scaled(b.mass());
    const Trajectory tr = evolve(f0, geometric_times(0.01, 1e3), s.gen.matrix);
    double prev = INFINITY;
    for (const Density& f : tr.densities) {
      const double n = f.values().lpNorm<1>();
      CHECK(n <= prev * (1 + 1e-10));
      prev = n;
    }
  }
  SUBCASE("bad time grids") {
    const std::vector<double> a{0.5, 1.0}, b{0.0, 2.0, 1.0};
    CHECK_THROWS(evolve(s.G, a, s.gen.matrix));
    CHECK_THROWS(evolve(s.G, b, s.gen.matrix));
  }
}

TEST_CASE("evolve: semigroup property at fixed dt") {
  const Setup s = canonical_1d(15.0, 150);
  EvolveOptions opt;
  opt.dt_initial = 0.125;
  opt.dt_growth = 1.0;
  opt.max_change = 1e9;
  const Density f0 = bump(s.grid, 4.0);
  const std::vector<double> t1{0.0, 1.0}, t2{0.0, 2.0}, t12{0.0, 3.0};
  const Density a = evolve(evolve(f0, t1, s.gen.matrix, opt).densities.back(), t2, s.gen.matrix, opt).densities.back();
  const Density b = evolve(f0, t12, s.gen.matrix, opt).densities.back();
  CHECK((a.values() - b.values()).lpNorm<Eigen::Infinity>() <= 1e-12 * b.values().maxCoeff());
}

TEST_CASE("implicit Euler is first order") {
  const Setup s = canonical_1d(15.0, 150);
  const Density f0 = bump(s.grid, 3.0);
  auto run = [&](double dt) {
    Density f = f0;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) f = step_implicit(f, dt, s.gen.matrix);
    return f.values();
  };
  const Vector ref = run(0.1 / 8), e1 = run(0.1) - ref, e2 = run(0.05) - ref;
  // against the dt/8 reference the exact ratio is (1 - 1/8) / (1/2 - 1/8) = 7/3
  const double ratio = e1.norm() / e2.norm();
  CHECK(ratio == doctest::Approx(7.0 / 3.0).epsilon(0.05));
}

TEST_CASE("geometric_times") {
  const auto t = geometric_times(0.01, 1.0, 10.0);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 0.01);
  CHECK(t[2] == doctest::Approx(0.1));
  CHECK(t[3] == 1.0);
  CHECK_THROWS(geometric_times(0.0, 1.0));
}

TEST_CASE("h1_seminorm quadrature oracle") {
  const Grid g(1, 12.0, 4000);
  const Density f = Density::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0] / 2); });
  // int |d/dx e^{-x^2/2}|^2 = int x^2 e^{-x^2} = sqrt(pi)/2
  CHECK(std::pow(h1_seminorm(f), 2) == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-4));
  const Grid g2(2, 8.0, 200);
  const Density f2 = Density::sample(g2, [](const Point& x) { return std::exp(-x.squaredNorm() / 2); });
  // int |grad e^{-|x|^2/2}|^2 over R^2 = 2 pi int r^3 e^{-r^2} dr = pi
  CHECK(std::pow(h1_seminorm(f2), 2) == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("default probes") {
  const Grid g(2, 5.0, 16);
  const auto p = default_probes(g, 3);
  CHECK(p.size() == 32);
  for (int k = 0; k < 16; ++k) CHECK(p[k].mass() == doctest::Approx(1.0));
  const auto q = default_probes(g, 3);
  CHECK(p[20].values() == q[20].values());
}

TEST_CASE("operator_norm_lower_bound") {
  const Setup s = canonical_1d(10.0, 200);
  const auto probes = default_probes(s.grid, 1);
  SUBCASE("t -> 0 with src = dst") {
    const NormFn l1 = lp_norm_fn(NormSpec(1.0, Weight::unit(), 0.0));
    EvolveOptions opt;
    opt.dt_initial = 1e-10;
    CHECK(operator_norm_lower_bound(s.gen.matrix, 1e-9, l1, l1, probes, opt) == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("S_B contracts in L^p(m) with certified constants") {
    const ForceField f = canonical_gradient_field(0.5, 1.0, 1);
    const Weight w = Weight::polynomial(2.0, 0.5);
    for (double p : {1.0, 2.0}) {
      const double a = 0.5 * psi0_asymptotic_constant(w, p, f);
      const SplittingResult r = find_splitting_constants(f, w, p, a, certificate_scan_grid(1, 1e6, 10000));
      REQUIRE(r.success);
      const SplitPair sp = split_generator(s.gen, r.M, r.R);
      const NormFn n = lp_norm_fn(NormSpec(p, w, 1.0));
      const std::vector<double> ts{1e-3, 1e-2, 1e-1, 1.0, 10.0};
      const auto bound = operator_norm_lower_bound(sp.B, ts, n, n, probes);
      for (double b : bound) CHECK(b <= 1.0 + 1e-12);
      for (size_t k = 1; k < bound.size(); ++k) CHECK(bound[k] <= bound[k - 1] * (1 + 1e-12));
    }
  }
  SUBCASE("S_L in L^1(<x>^4) is bounded by the moment of G at large t") {
    // |S(t) f|_m <= |S(t)|f||_m -> |f|_1 |G|_m <= |f|_m |G|_m
    const NormSpec spec(1.0, Weight::polynomial(4.0, 0.5), 1.0);
    const NormFn n = lp_norm_fn(spec);
    const std::vector<double> ts{0.1, 1.0, 10.0, 100.0};
    const auto b = operator_norm_lower_bound(s.gen.matrix, ts, n, n, probes);
    for (double v : b) CHECK(std::isfinite(v));
    CHECK(b.back() <= 1.001 * weighted_lp_norm(s.G, spec));
    CHECK(b.back() >= 0.5 * weighted_lp_norm(s.G, spec));
  }
}
