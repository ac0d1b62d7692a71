#include "subfp/inequalities.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace subfp {

double log_mean(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("log_mean: arguments must be positive");
  const double r = a / b - 1.0;
  if (std::abs(r) < 1e-6) return b * (1.0 + r / 2.0 - r * r / 12.0);
  return (a - b) / std::log1p(r);
}

namespace {

template <class Visit>
void for_each_face(const Grid& g, Visit&& visit) {
  const int n = g.cells_per_axis();
  if (g.dim() == 1) {
    for (int i = 0; i + 1 < n; ++i) visit(i, i + 1);
    return;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int k = g.index(i, j);
      if (i + 1 < n) visit(k, g.index(i + 1, j));
      if (j + 1 < n) visit(k, g.index(i, j + 1));
    }
}

}  // namespace

double weak_poincare_constant(const Density& G, double gamma, PoincareWeight right) {
  if (!(G.min() > 0.0)) throw std::invalid_argument("weak_poincare_constant: G must be positive");
  const Grid& g = G.grid();
  const int n = g.size();
  const double vol = g.cell_volume();
  const double hfac = g.dim() == 1 ? 1.0 / g.spacing() : 1.0;

  std::vector<Eigen::Triplet<double>> trips;
  Vector diag = Vector::Zero(n);
  for_each_face(g, [&](int i, int j) {
    const double w = hfac * G[i] * G[j] / log_mean(G[i], G[j]);
    trips.emplace_back(i, j, -w);
    trips.emplace_back(j, i, -w);
    diag[i] += w;
    diag[j] += w;
  });
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, diag[i]);
    trips.emplace_back(i, n, vol * G[i]);
    trips.emplace_back(n, i, vol * G[i]);
  }
  SparseMatrix bordered(n + 1, n + 1);
  bordered.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success) throw ConvergenceError("weak_poincare_constant: factorization failed");

  Vector D(n);
  for (int i = 0; i < n; ++i) {
    const double rho =
        right == PoincareWeight::bracket ? std::pow(bracket(g.center(i)), 2.0 * gamma - 2.0) : 1.0;
    D[i] = vol * rho * G[i];
  }
  auto apply = [&](const Vector& v) -> Vector {
    Vector rhs = Vector::Zero(n + 1);
    rhs.head(n) = D.cwiseProduct(v);
    return lu.solve(rhs).head(n);
  };
  auto dot = [&](const Vector& a, const Vector& b) { return a.dot(D.cwiseProduct(b)); };

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector q(n);
  for (int i = 0; i < n; ++i) q[i] = u(rng);
  q = apply(q);
  q /= std::sqrt(dot(q, q));

  const int max_iter = std::min(n - 1, 300);
  std::vector<Vector> Q{q};
  std::vector<double> alpha, beta;
  double theta_prev = 0.0, theta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = apply(Q.back());
    alpha.push_back(dot(w, Q.back()));
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& qq : Q) w -= dot(w, qq) * qq;
    const double b = std::sqrt(dot(w, w));

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) T(k, k) = alpha[k];
    for (int k = 0; k + 1 < m; ++k) T(k, k + 1) = T(k + 1, k) = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    theta = es.eigenvalues().maxCoeff();
    if (m > 4 && std::abs(theta - theta_prev) <= 1e-13 * std::abs(theta)) break;
    theta_prev = theta;
    if (b <= 1e-14 * std::abs(theta)) break;
    beta.push_back(b);
    Q.push_back(w / b);
  }
  if (!(theta > 0.0)) throw ConvergenceError("weak_poincare_constant: Lanczos produced no positive Ritz value");
  return 1.0 / theta;
}

LyapunovReport lyapunov_check(const ForceField& field, const ScalarMap& w, double zeta0, double M,
                              double R, const std::vector<Point>& samples) {
  if (samples.empty()) throw std::invalid_argument("lyapunov_check: empty sample set");
  const int dim = field.dim();
  const double gamma = field.gamma();
  LyapunovReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const Point& x : samples) {
    const double h = 1e-3 * bracket(x);
    const double w0 = w(x);
    Point grad = Point::Zero();
    double lap = 0.0;
    for (int j = 0; j < dim; ++j) {
      const Point e = j == 0 ? Point(h, 0.0) : Point(0.0, h);
      const double wp = w(x + e), wm = w(x - e), wp2 = w(x + 2 * e), wm2 = w(x - 2 * e);
      grad[j] = (-wp2 + 8 * wp - 8 * wm + wm2) / (12.0 * h);
      lap += (-wp2 + 16 * wp - 30 * w0 + 16 * wm - wm2) / (12.0 * h * h);
    }
    const Point gradV = field.has_potential() ? field.potential_gradient(x) : field.force(x);
    const double zeta = zeta0 * std::pow(bracket(x), 2.0 * (gamma - 1.0));
    const double v = lap - gradV.dot(grad) - w0 * (-zeta + M * chi_R(x, R));
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst = x;
    }
  }
  return rep;
}

Convex entropy_square() {
  return [](double s) { return s * s; };
}
Convex entropy_abs() {
  return [](double s) { return std::abs(s); };
}
Convex entropy_excess(double c) {
  return [c](double s) { return std::max(s - c, 0.0); };
}

EntropySeries entropy_series(const Trajectory& traj, const Density& G, const Convex& j) {
  if (!(G.min() > 0.0)) throw std::invalid_argument("entropy_series: G must be positive");
  EntropySeries es;
  es.times = traj.times;
  const double vol = G.grid().cell_volume();
  for (const Density& f : traj.densities) {
    if (f.grid() != G.grid()) throw std::invalid_argument("entropy_series: grid mismatch");
    double h = 0.0;
    for (int i = 0; i < f.size(); ++i) h += j(f[i] / G[i]) * G[i];
    es.values.push_back(vol * h);
  }
  es.max_increase = -std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < es.values.size(); ++k)
    es.max_increase = std::max(es.max_increase, es.values[k] - es.values[k - 1]);
  if (es.values.size() < 2) es.max_increase = 0.0;
  const double tol = 1e-9 * std::max(std::abs(es.values.front()), std::numeric_limits<double>::min());
  es.monotone = es.max_increase <= tol;
  return es;
}

double nash_quotient(const Density& g) {
  const Grid& grid = g.grid();
  const double vol = grid.cell_volume();
  const double l2sq = vol * g.values().squaredNorm();
  if (!(l2sq > 0.0)) throw std::invalid_argument("nash_quotient: zero input");
  const double l1 = vol * g.values().lpNorm<1>();
  const double grad = std::pow(h1_seminorm(g), 2);
  const double d = grid.dim();
  return l2sq / (std::pow(grad, d / (d + 2.0)) * std::pow(l1, 4.0 / (d + 2.0)));
}

InterpolationReport interpolation_chain_check(const Trajectory& traj, const Density& G,
                                              double gamma, double alpha, double mu) {
  if (!(alpha > 1.0)) throw std::invalid_argument("interpolation_chain_check: alpha must exceed 1");
  if (traj.size() < 2) throw std::invalid_argument("interpolation_chain_check: trajectory too short");
  const Density& f0 = traj.densities.front();
  const double l1 = f0.grid().cell_volume() * f0.values().lpNorm<1>();
  if (std::abs(f0.mass()) > 1e-12 * std::max(l1, 1e-300))
    throw std::invalid_argument("interpolation_chain_check: initial datum is not mean-zero");
  const Grid& g = G.grid();
  Vector w0(g.size()), w1(g.size());
  for (int i = 0; i < g.size(); ++i) {
    w1[i] = 1.0 / std::sqrt(G[i]);
    w0[i] = w1[i] * std::pow(bracket(g.center(i)), gamma - 1.0);
  }
  const Vector inv_g = G.values().cwiseInverse();

  InterpolationReport rep;
  rep.alpha = alpha;
  for (const Density& f : traj.densities) {
    rep.E0.push_back(weighted_lp_norm(f, 2.0, w0));
    rep.E1.push_back(weighted_lp_norm(f, 2.0, w1));
    rep.E2.push_back(weighted_lp_norm(f, kInfinity, inv_g));
  }
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  rep.max_differential_violation = -std::numeric_limits<double>::infinity();
  // snapshots at round-off level carry no information about the inequalities
  const double floor = 1e-10 * rep.E1.front();
  for (size_t k = 0; k < traj.size(); ++k) {
    if (rep.E1[k] <= floor) break;
    if (rep.E0[k] > 0.0 && rep.E2[k] > 0.0) {
      const double r = rep.E1[k] / (std::pow(rep.E0[k], 1.0 / alpha) * std::pow(rep.E2[k], 1.0 - 1.0 / alpha));
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    if (k == 0) continue;
    const double dt = traj.times[k] - traj.times[k - 1];
    const double lhs = (rep.E1[k] * rep.E1[k] - rep.E1[k - 1] * rep.E1[k - 1]) / dt;
    const double sink = 2.0 * mu * rep.E0[k] * rep.E0[k];
    if (sink > 0.0)
      rep.max_differential_violation = std::max(rep.max_differential_violation, (lhs + sink) / sink);
    if (traj.times[k] > 0.0 && rep.E2[0] > 0.0)
      rep.envelope_constant = std::max(
          rep.envelope_constant, rep.E1[k] * std::pow(traj.times[k], 1.0 / (alpha - 1.0)) / rep.E2[0]);
  }
  rep.C_alpha = rmax;
  rep.ratio_spread = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  return rep;
}

InterpolationReport best_interpolation_alpha(const Trajectory& traj, const Density& G,
                                             double gamma, const std::vector<double>& alphas,
                                             double mu) {
  if (alphas.empty()) throw std::invalid_argument("best_interpolation_alpha: empty alpha grid");
  InterpolationReport best;
  best.ratio_spread = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    InterpolationReport r = interpolation_chain_check(traj, G, gamma, a, mu);
    if (r.ratio_spread < best.ratio_spread) best = std::move(r);
  }
  return best;
}

}  // namespace subfp
