#pragma once

#include "subfp/arnoldi.hpp"
#include "subfp/generator.hpp"

#include <complex>
#include <vector>

namespace subfp {

struct SteadyOptions {
  double shift_factor = 1e-8;  // epsilon = shift_factor * ||L||_inf
  int max_iterations = 200;
  double tol = 1e-13;          // max componentwise relative change between iterates
};

/// Positive unit-mass null vector of the generator by shifted inverse iteration.
/// `seed` must be positive; default is the constant vector.
Density solve_steady(const Generator& gen, const SteadyOptions& opt = {},
                     const Vector* seed = nullptr);

/// ||L G||_inf / (||L||_inf ||G||_inf).
double steady_residual(const Generator& gen, const Density& G);

struct TailShell {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double log_sup = 0.0;  // log sup G e^{kappa <x>^gamma} over the shell
};

struct TailReport {
  std::vector<TailShell> shells;
  double inner_sup = 0.0;
  double outer_sup = 0.0;
  double ratio = 0.0;  // outer_sup / inner_sup
  bool pass = false;
};

/// Boundedness proxy for G e^{kappa <x>^gamma}: pass iff the supremum over the
/// outer half (|x| > L/2) is at most 10 times the inner one.
TailReport tail_bound_check(const Density& G, double kappa, double gamma, int shells = 8);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // descending real part
  std::vector<double> residuals;
  int zero_multiplicity = 0;     // eigenvalues with |lambda| <= zero_tol
  double second_singular = 0.0;  // of the two rightmost normalized eigenvectors
  double null_vector_error = 0.0;  // max |v/|v| - G/|G|| over cells, v the rightmost vector
  double max_other_real = 0.0;   // max Re over eigenvalues after the first
  bool simple_zero = false;
  bool pass = false;
};

/// The `count` eigenvalues nearest zero (shift-invert), with the checks
/// lambda_1 ~ 0, simple, eigenvector ~ G, others Re < 0.
SpectrumReport rightmost_spectrum(const Generator& gen, int count, const Density* G = nullptr,
                                  double zero_tol = 1e-10);

/// Mass of G in the outer 10% of the domain (|x|_inf > 0.9 L), relative to total mass.
double tail_mass_fraction(const Density& G);

}  // namespace subfp
