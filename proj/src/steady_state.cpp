#include "subfp/steady_state.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <sstream>

namespace subfp {

Density solve_steady(const Generator& gen, const SteadyOptions& opt, const Vector* seed) {
  const int n = gen.size();
  const double vol = gen.grid.cell_volume();
  const double eps = opt.shift_factor * matrix_norm_inf(gen.matrix);
  SparseMatrix I(n, n);
  I.setIdentity();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(gen.matrix - eps * I);
  if (lu.info() != Eigen::Success) throw ConvergenceError("solve_steady: factorization failed");

  Vector x = seed ? *seed : Vector::Ones(n);
  if (x.size() != n) throw std::invalid_argument("solve_steady: seed has the wrong size");
  if (!(x.minCoeff() > 0.0)) throw std::invalid_argument("solve_steady: seed must be positive");
  x /= vol * x.sum();

  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iterations && change > opt.tol; ++it) {
    // -(L - eps I) is a nonsingular M-matrix, so -(L - eps I)^{-1} x stays positive
    Vector y = -lu.solve(x);
    y /= vol * y.sum();
    change = ((y - x).array().abs() / y.array().abs()).maxCoeff();
    x.swap(y);
  }
  if (change > opt.tol) {
    std::ostringstream msg;
    msg << "solve_steady: no convergence after " << it << " iterations (change " << change << ")";
    throw ConvergenceError(msg.str());
  }
  const double mn = x.minCoeff();
  if (!(mn > 0.0)) {
    std::ostringstream msg;
    msg << "solve_steady: nonpositive entry " << mn << " in the steady state";
    throw ConvergenceError(msg.str());
  }
  return Density(gen.grid, std::move(x));
}

double steady_residual(const Generator& gen, const Density& G) {
  const Vector r = gen.matrix * G.values();
  return r.lpNorm<Eigen::Infinity>() /
         (matrix_norm_inf(gen.matrix) * G.values().lpNorm<Eigen::Infinity>());
}

TailReport tail_bound_check(const Density& G, double kappa, double gamma, int shells) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("tail_bound_check: gamma in (0,1)");
  if (!(kappa > 0.0 && kappa * gamma < 1.0))
    throw std::invalid_argument("tail_bound_check: need 0 < kappa < 1/gamma");
  if (shells < 2) throw std::invalid_argument("tail_bound_check: need at least 2 shells");
  const Grid& g = G.grid();
  const double half = 0.5 * g.half_width();
  double r_max = 0.0;
  for (int i = 0; i < g.size(); ++i) r_max = std::max(r_max, g.center(i).norm());

  const double ninf = -std::numeric_limits<double>::infinity();
  TailReport rep;
  rep.shells.resize(shells);
  for (int s = 0; s < shells; ++s) {
    rep.shells[s].r_lo = r_max * s / shells;
    rep.shells[s].r_hi = r_max * (s + 1) / shells;
    rep.shells[s].log_sup = ninf;
  }
  double inner = ninf, outer = ninf;
  for (int i = 0; i < g.size(); ++i) {
    const Point x = g.center(i);
    if (!(G[i] > 0.0)) throw std::invalid_argument("tail_bound_check: G must be positive");
    const double lv = std::log(G[i]) + kappa * std::pow(bracket(x), gamma);
    const double r = x.norm();
    const int s = std::min(shells - 1, static_cast<int>(r / r_max * shells));
    rep.shells[s].log_sup = std::max(rep.shells[s].log_sup, lv);
    if (r <= half) inner = std::max(inner, lv);
    else outer = std::max(outer, lv);
  }
  rep.inner_sup = std::exp(inner);
  rep.outer_sup = std::exp(outer);
  rep.ratio = std::exp(outer - inner);
  rep.pass = rep.ratio <= 10.0;
  return rep;
}

SpectrumReport rightmost_spectrum(const Generator& gen, int count, const Density* G,
                                  double zero_tol) {
  if (count < 2) throw std::invalid_argument("rightmost_spectrum: count must be >= 2");
  ArnoldiOptions opt;
  opt.shift = 1e-9 * std::max(1.0, matrix_norm_inf(gen.matrix));
  const std::vector<EigenPair> pairs = shift_invert_eigs(gen.matrix, count, opt);

  SpectrumReport rep;
  for (const EigenPair& p : pairs) {
    rep.eigenvalues.push_back(p.value);
    rep.residuals.push_back(p.residual);
    if (std::abs(p.value) <= zero_tol) ++rep.zero_multiplicity;
  }
  rep.max_other_real = -std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < pairs.size(); ++k)
    rep.max_other_real = std::max(rep.max_other_real, pairs[k].value.real());

  Eigen::MatrixXcd two(gen.size(), 2);
  two.col(0) = pairs[0].vector / pairs[0].vector.norm();
  two.col(1) = pairs[1].vector / pairs[1].vector.norm();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(two);
  rep.second_singular = svd.singularValues()[1];
  rep.simple_zero = rep.zero_multiplicity == 1 && rep.second_singular >= 1e-8;

  if (G) {
    Vector v = pairs[0].vector.real();
    if (v.sum() < 0.0) v = -v;
    v /= v.norm();
    const Vector g = G->values() / G->values().norm();
    rep.null_vector_error = (v - g).lpNorm<Eigen::Infinity>();
  }
  rep.pass = std::abs(pairs[0].value) <= zero_tol && rep.simple_zero && rep.max_other_real < 0.0 &&
             (!G || rep.null_vector_error <= 1e-6);
  return rep;
}

double tail_mass_fraction(const Density& G) {
  const Grid& g = G.grid();
  const double cut = 0.9 * g.half_width();
  double outer = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const Point x = g.center(i);
    if (std::max(std::abs(x[0]), std::abs(x[1])) > cut) outer += G[i];
  }
  return outer * g.cell_volume() / G.mass();
}

}  // namespace subfp
