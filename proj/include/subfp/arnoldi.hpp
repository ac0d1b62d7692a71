#pragma once

#include "subfp/generator.hpp"

#include <complex>
#include <vector>

namespace subfp {

struct EigenPair {
  std::complex<double> value;
  Eigen::VectorXcd vector;
  double residual = 0.0;  // ||A v - lambda v|| / ||v||
};

struct ArnoldiOptions {
  double shift = 1e-6;     // sigma; must not be an eigenvalue
  int krylov_dim = 0;      // 0: chosen from count
  int max_restarts = 4;    // each retry doubles the Krylov dimension
  double ritz_tol = 1e-9;  // relative Ritz residual in the shift-inverted problem
  double refine_tol = 1e-8;
  int refine_steps = 8;
};

/// Eigenvalues of A closest to the shift, found by Arnoldi on (A - sigma I)^{-1}
/// with full reorthogonalization, then polished by complex inverse iteration.
/// Sorted by descending real part.
std::vector<EigenPair> shift_invert_eigs(const SparseMatrix& A, int count,
                                         const ArnoldiOptions& opt = {});

}  // namespace subfp
