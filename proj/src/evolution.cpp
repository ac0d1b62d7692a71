#include "subfp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace subfp {

ImplicitStepper::ImplicitStepper(SparseMatrix op, int refinement_steps, size_t cache_size)
    : op_(std::move(op)), refinement_(refinement_steps), cache_size_(std::max<size_t>(1, cache_size)) {
  if (op_.rows() != op_.cols()) throw std::invalid_argument("ImplicitStepper: operator not square");
  op_.makeCompressed();
}

Eigen::SparseLU<SparseMatrix>& ImplicitStepper::factor(double dt) {
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (it->dt == dt) {
      cache_.splice(cache_.begin(), cache_, it);
      return *cache_.front().lu;
    }
  }
  const int n = static_cast<int>(op_.rows());
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix a = I - dt * op_;
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu->compute(a);
  if (lu->info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "implicit step: factorization of I - dt op failed (dt = " << dt << ")";
    throw ConvergenceError(msg.str());
  }
  ++factorizations_;
  cache_.push_front({dt, lu});
  if (cache_.size() > cache_size_) cache_.pop_back();
  return *cache_.front().lu;
}

Vector ImplicitStepper::step(const Vector& f, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("implicit step: dt must be positive");
  if (f.size() != op_.rows()) throw std::invalid_argument("implicit step: size mismatch");
  auto& lu = factor(dt);
  Vector x = lu.solve(f);
  for (int k = 0; k < refinement_; ++k) {
    const Vector r = f - (x - dt * (op_ * x));
    x += lu.solve(r);
  }
  if (!x.allFinite()) {
    std::ostringstream msg;
    msg << "implicit step: solution not finite (dt = " << dt << ")";
    throw ConvergenceError(msg.str());
  }
  return x;
}

Density step_implicit(const Density& f, double dt, const SparseMatrix& op) {
  ImplicitStepper s(op, 1, 1);
  return Density(f.grid(), s.step(f.values(), dt));
}

Trajectory evolve(const Density& f0, std::span<const double> times, const SparseMatrix& op,
                  const EvolveOptions& opt) {
  if (times.empty() || times.front() != 0.0)
    throw std::invalid_argument("evolve: output times must start at 0");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("evolve: times must increase");
  if (f0.size() != op.rows()) throw std::invalid_argument("evolve: f0 not on the operator's grid");

  ImplicitStepper stepper(op, opt.refinement_steps);
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.densities.push_back(f0);
  tr.dt_min = 1e300;

  int level = 0;
  auto ladder = [&](int l) {
    return std::min(opt.dt_max, opt.dt_initial * std::pow(opt.dt_growth, l));
  };
  Vector f = f0.values();
  double t = 0.0;
  for (size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (t < target) {
      const double remaining = target - t;
      const double rung = ladder(level);
      const bool last = rung >= remaining * (1.0 - 1e-12);
      const double dt = last ? remaining : rung;
      Vector next = stepper.step(f, dt);
      const double base = f.lpNorm<1>();
      const double change = base > 0.0 ? (next - f).lpNorm<1>() / base : 0.0;
      if (change > opt.max_change && dt > 1e-14 * std::max(1.0, t)) {
        level -= 4;
        ++tr.rejected;
        continue;
      }
      f.swap(next);
      t = last ? target : t + dt;
      ++tr.steps;
      tr.dt_min = std::min(tr.dt_min, dt);
      tr.dt_max = std::max(tr.dt_max, dt);
      if (change < 0.5 * opt.max_change && !last) ++level;
    }
    tr.times.push_back(target);
    tr.densities.emplace_back(f0.grid(), f);
  }
  return tr;
}

std::vector<double> geometric_times(double t_first, double t_end, double ratio) {
  if (!(t_first > 0.0) || !(t_end >= t_first) || !(ratio > 1.0))
    throw std::invalid_argument("geometric_times: need 0 < t_first <= t_end and ratio > 1");
  std::vector<double> out{0.0};
  for (int k = 0;; ++k) {
    const double t = t_first * std::pow(ratio, k);
    if (t >= t_end * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(t_end);
  return out;
}

NormFn lp_norm_fn(const NormSpec& spec) {
  return [spec](const Density& f) { return weighted_lp_norm(f, spec); };
}

double h1_seminorm(const Density& f) {
  const Grid& g = f.grid();
  const int n = g.cells_per_axis();
  const double scale = g.dim() == 1 ? 1.0 / g.spacing() : 1.0;
  double acc = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i + 1 < n; ++i) acc += std::pow(f[i + 1] - f[i], 2);
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int k = g.index(i, j);
        if (i + 1 < n) acc += std::pow(f[g.index(i + 1, j)] - f[k], 2);
        if (j + 1 < n) acc += std::pow(f[g.index(i, j + 1)] - f[k], 2);
      }
  }
  return std::sqrt(scale * acc);
}

std::vector<Density> default_probes(const Grid& grid, unsigned seed, int deltas, int randoms) {
  std::vector<Density> out;
  const double L = grid.half_width();
  const double h = grid.spacing();
  const int n = grid.cells_per_axis();
  auto cell_of = [&](double c) { return std::clamp(static_cast<int>((c + L) / h), 0, n - 1); };
  for (int k = 0; k < deltas; ++k) {
    const double r = 0.9 * L * k / std::max(1, deltas - 1);
    Vector v = Vector::Zero(grid.size());
    int idx = 0;
    if (grid.dim() == 1) {
      idx = cell_of(r);
    } else {
      const double phi = 2.0 * M_PI * k / deltas;
      idx = grid.index(cell_of(r * std::cos(phi)), cell_of(r * std::sin(phi)));
    }
    v[idx] = 1.0 / grid.cell_volume();
    out.emplace_back(grid, std::move(v));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < randoms; ++k) {
    Vector v(grid.size());
    for (int i = 0; i < grid.size(); ++i) v[i] = u(rng);
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

std::vector<double> operator_norm_lower_bound(const SparseMatrix& op, std::span<const double> t,
                                              const NormFn& src, const NormFn& dst,
                                              const std::vector<Density>& probes,
                                              const EvolveOptions& opt) {
  if (probes.empty()) throw std::invalid_argument("operator_norm_lower_bound: no probes");
  std::vector<double> times{0.0};
  for (double s : t) {
    if (!(s > times.back())) throw std::invalid_argument("operator_norm_lower_bound: t must increase from > 0");
    times.push_back(s);
  }
  std::vector<double> best(t.size(), 0.0);
  for (const Density& p : probes) {
    const double base = src(p);
    if (!(base > 0.0)) throw std::invalid_argument("operator_norm_lower_bound: zero probe");
    const Trajectory tr = evolve(p, times, op, opt);
    for (size_t k = 0; k < t.size(); ++k)
      best[k] = std::max(best[k], dst(tr.densities[k + 1]) / base);
  }
  return best;
}

double operator_norm_lower_bound(const SparseMatrix& op, double t, const NormFn& src,
                                 const NormFn& dst, const std::vector<Density>& probes,
                                 const EvolveOptions& opt) {
  const double ts[1] = {t};
  return operator_norm_lower_bound(op, std::span<const double>(ts, 1), src, dst, probes, opt)[0];
}

}  // namespace subfp
