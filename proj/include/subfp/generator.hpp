#pragma once

#include "subfp/force_field.hpp"
#include "subfp/grid.hpp"
#include "subfp/weights.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>

namespace subfp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Bernoulli function B(z) = z / (e^z - 1), B(0) = 1.
double bernoulli(double z);
/// B'(z).
double bernoulli_derivative(double z);

/// Discrete version of f -> Laplacian(f) + div(f F) on cell averages, with
/// exponentially fitted two-point fluxes and zero flux through the outer boundary.
struct Generator {
  Grid grid;
  SparseMatrix matrix;
  /// True when faces were fitted to the stream function of the field.
  bool stream_fitted = false;

  int size() const { return static_cast<int>(matrix.rows()); }
};

Generator build_generator(const Grid& grid, const ForceField& field);

/// Face drift delta for the face between cells i and j = i + e_axis, before stream fitting.
double face_drift(const ForceField& field, const Point& xi, const Point& xj);

/// L = A + B with A = M chi_R (diagonal) and B = L - A.
struct SplitPair {
  Vector A;  // diagonal of A
  SparseMatrix B;
  double M = 0.0;
  double R = 1.0;
};

SplitPair split_generator(const Generator& gen, double M, double R,
                          const ChiProfile& chi = chi_quintic);

/// Volume-weighted transpose. The grid is uniform, so this is the transpose.
SparseMatrix adjoint_generator(const Generator& gen);

/// Infinity norm (max absolute row sum).
double matrix_norm_inf(const SparseMatrix& a);

/// "row col value" lines, 0-based, one nonzero per line, preceded by "rows cols nnz".
void write_coordinate_text(std::ostream& os, const SparseMatrix& a);

}  // namespace subfp
