#pragma once

#include "subfp/types.hpp"

#include <functional>

namespace subfp {

/// Uniform cell-centred grid on [-L, L]^dim with n cells per axis.
/// Cells are numbered i + n*j (i along x1).
class Grid {
public:
  Grid() = default;
  Grid(int dim, double half_width, int cells_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int cells_per_axis() const { return n_; }
  int size() const { return dim_ == 1 ? n_ : n_ * n_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double cell_volume() const;
  double total_volume() const;

  Point center(int index) const;
  int index(int i, int j = 0) const { return i + n_ * j; }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && n_ == o.n_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

private:
  int dim_ = 1;
  double half_width_ = 1.0;
  int n_ = 8;
};

Grid build_grid(int dim, double half_width, int cells_per_axis);

/// Cell averages on a grid together with their mass M(f) = sum vol_i f_i.
class Density {
public:
  Density() = default;
  Density(Grid grid, Vector values);

  /// Cell-centre samples of a function.
  static Density sample(const Grid& grid, const std::function<double(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }
  double mass() const { return mass_; }
  double min() const { return values_.minCoeff(); }

  Density operator-(const Density& o) const;
  Density operator+(const Density& o) const;
  Density scaled(double c) const;

private:
  Grid grid_;
  Vector values_;
  double mass_ = 0.0;
};

double mass(const Density& f);

}  // namespace subfp
