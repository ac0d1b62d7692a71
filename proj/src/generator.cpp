#include "subfp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace subfp {

double bernoulli(double z) {
  if (std::abs(z) < 1e-10) return 1.0 - 0.5 * z;
  if (z > 745.0) return 0.0;
  return z / std::expm1(z);
}

double bernoulli_derivative(double z) {
  if (std::abs(z) < 1e-4) return -0.5 + z / 6.0;
  const double b = bernoulli(z);
  // B' = B/z - B e^z/(e^z - 1), and e^z/(e^z - 1) = -1/expm1(-z)
  return b / z + b / std::expm1(-z);
}

double face_drift(const ForceField& field, const Point& xi, const Point& xj) {
  const Point mid = 0.5 * (xi + xj);
  const Point dx = xj - xi;
  if (field.has_potential()) {
    const Point rest = field.force(mid) - field.potential_gradient(mid);
    return field.potential(xj) - field.potential(xi) + rest.dot(dx);
  }
  return field.force(mid).dot(dx);
}

namespace {

// Solve B(d) - e^{-dV} B(-d) = c for d; the left side is strictly decreasing.
double fit_stream_drift(double dV, double c, double guess) {
  const double e = std::exp(-dV);
  auto g = [&](double d) { return bernoulli(d) - e * bernoulli(-d) - c; };
  auto dg = [&](double d) { return bernoulli_derivative(d) + e * bernoulli_derivative(-d); };

  double step = std::max(1.0, std::abs(guess));
  double lo = guess - step, hi = guess + step;
  int expand = 0;
  while (g(lo) < 0.0 && expand++ < 200) lo -= (step *= 2.0);
  step = std::max(1.0, std::abs(guess));
  expand = 0;
  while (g(hi) > 0.0 && expand++ < 200) hi += (step *= 2.0);
  if (g(lo) < 0.0 || g(hi) > 0.0) throw ConvergenceError("stream fit: could not bracket face drift");

  double d = std::clamp(guess, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double r = g(d);
    if (r == 0.0) return d;
    if (r > 0.0) lo = d; else hi = d;
    double next = d - r / dg(d);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - d) <= 1e-15 * (1.0 + std::abs(d))) return next;
    d = next;
  }
  return d;
}

}  // namespace

Generator build_generator(const Grid& grid, const ForceField& field) {
  if (grid.dim() != field.dim())
    throw std::invalid_argument("build_generator: grid and field dimensions differ");
  const int n = grid.cells_per_axis();
  const int dim = grid.dim();
  const double h = grid.spacing();
  const double L = grid.half_width();
  const double c = 1.0 / (h * h);
  const bool stream = dim == 2 && field.has_stream();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(grid.size()) * (2 * dim + 1));
  Vector diag = Vector::Zero(grid.size());

  auto psi_at = [&](int a, int b) {
    if (a == 0 || b == 0 || a == n || b == n) return 0.0;
    return field.stream(Point(-L + a * h, -L + b * h));
  };

  auto add_face = [&](int i, int j, double delta) {
    const double bp = bernoulli(delta) * c;
    const double bm = bernoulli(-delta) * c;
    trips.emplace_back(j, i, bp);
    trips.emplace_back(i, j, bm);
    diag[i] -= bp;
    diag[j] -= bm;
  };

  auto face = [&](int i, int j, double phi) {
    const Point xi = grid.center(i), xj = grid.center(j);
    double delta = face_drift(field, xi, xj);
    if (stream) {
      const double Vi = field.potential(xi);
      const double dV = field.potential(xj) - Vi;
      delta = fit_stream_drift(dV, phi * std::exp(Vi), delta);
    }
    add_face(i, j, delta);
  };

  if (dim == 1) {
    for (int i = 0; i + 1 < n; ++i) face(i, i + 1, 0.0);
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int k = grid.index(i, j);
        if (i + 1 < n) {
          const double phi = stream ? psi_at(i + 1, j + 1) - psi_at(i + 1, j) : 0.0;
          face(k, grid.index(i + 1, j), phi);
        }
        if (j + 1 < n) {
          const double phi = stream ? psi_at(i, j + 1) - psi_at(i + 1, j + 1) : 0.0;
          face(k, grid.index(i, j + 1), phi);
        }
      }
    }
  }
  for (int i = 0; i < grid.size(); ++i) trips.emplace_back(i, i, diag[i]);

  Generator gen;
  gen.grid = grid;
  gen.stream_fitted = stream;
  gen.matrix.resize(grid.size(), grid.size());
  gen.matrix.setFromTriplets(trips.begin(), trips.end());
  gen.matrix.makeCompressed();
  return gen;
}

SplitPair split_generator(const Generator& gen, double M, double R, const ChiProfile& chi) {
  if (!(M >= 0.0)) throw std::invalid_argument("split_generator: M must be >= 0");
  if (!(R > 0.0)) throw std::invalid_argument("split_generator: R must be positive");
  SplitPair sp;
  sp.M = M;
  sp.R = R;
  sp.A = Vector::Zero(gen.size());
  for (int i = 0; i < gen.size(); ++i) sp.A[i] = M * chi_R(gen.grid.center(i), R, chi);
  sp.B = gen.matrix;
  for (int i = 0; i < gen.size(); ++i)
    if (sp.A[i] != 0.0) sp.B.coeffRef(i, i) -= sp.A[i];
  return sp;
}

SparseMatrix adjoint_generator(const Generator& gen) {
  SparseMatrix t = gen.matrix.transpose();
  t.makeCompressed();
  return t;
}

double matrix_norm_inf(const SparseMatrix& a) {
  Vector rows = Vector::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

void write_coordinate_text(std::ostream& os, const SparseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  char buf[64];
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  }
}

}  // namespace subfp
