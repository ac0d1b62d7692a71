#pragma once

#include "subfp/generator.hpp"
#include "subfp/weights.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace subfp {

/// Implicit Euler stepper (I - dt op) f+ = f with a small cache of factorizations.
class ImplicitStepper {
public:
  explicit ImplicitStepper(SparseMatrix op, int refinement_steps = 1, size_t cache_size = 4);

  Vector step(const Vector& f, double dt);
  const SparseMatrix& op() const { return op_; }
  int factorizations() const { return factorizations_; }

private:
  struct Entry {
    double dt;
    std::shared_ptr<Eigen::SparseLU<SparseMatrix>> lu;
  };
  Eigen::SparseLU<SparseMatrix>& factor(double dt);

  SparseMatrix op_;
  int refinement_;
  size_t cache_size_;
  std::list<Entry> cache_;
  int factorizations_ = 0;
};

/// One implicit Euler step.
Density step_implicit(const Density& f, double dt, const SparseMatrix& op);

struct EvolveOptions {
  double dt_initial = 1e-3;
  double dt_growth = 1.189207115002721;  // 2^{1/4}
  double dt_max = 1e300;
  double max_change = 0.05;  // per-step relative L1 change
  int refinement_steps = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Density> densities;
  std::string scheme = "implicit-euler";
  int steps = 0;
  int rejected = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;

  size_t size() const { return times.size(); }
};

/// Snapshots at `times` (increasing, starting at 0). Between outputs the
/// interval is split into equal substeps no longer than the current dt, which
/// grows geometrically while the per-step relative change stays under half the
/// cap and is halved when a step exceeds the cap.
Trajectory evolve(const Density& f0, std::span<const double> times, const SparseMatrix& op,
                  const EvolveOptions& opt = {});

/// 0, t_first, t_first r, t_first r^2, ... up to and including t_end.
std::vector<double> geometric_times(double t_first, double t_end, double ratio = 1.15);

using NormFn = std::function<double(const Density&)>;

NormFn lp_norm_fn(const NormSpec& spec);

/// Discrete H^1 seminorm (sum over interior faces of h^{d-2} (f_j - f_i)^2)^{1/2}.
double h1_seminorm(const Density& f);

/// Default probe set: single-cell deltas at 16 radial positions and 16 random
/// sign-mixed vectors.
std::vector<Density> default_probes(const Grid& grid, unsigned seed = 1, int deltas = 16,
                                    int randoms = 16);

/// max over probes of ||S(t) probe||_dst / ||probe||_src for each requested t.
std::vector<double> operator_norm_lower_bound(const SparseMatrix& op, std::span<const double> t,
                                              const NormFn& src, const NormFn& dst,
                                              const std::vector<Density>& probes,
                                              const EvolveOptions& opt = {});

double operator_norm_lower_bound(const SparseMatrix& op, double t, const NormFn& src,
                                 const NormFn& dst, const std::vector<Density>& probes,
                                 const EvolveOptions& opt = {});

}  // namespace subfp
