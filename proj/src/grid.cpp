#include "subfp/grid.hpp"

#include <stdexcept>
#include <string>

namespace subfp {

Grid::Grid(int dim, double half_width, int cells_per_axis)
    : dim_(dim), half_width_(half_width), n_(cells_per_axis) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (!(half_width > 0.0)) throw std::invalid_argument("grid: half width must be positive");
  if (cells_per_axis < 8)
    throw std::invalid_argument("grid: need at least 8 cells per axis, got " +
                                std::to_string(cells_per_axis));
}

double Grid::cell_volume() const {
  const double h = spacing();
  return dim_ == 1 ? h : h * h;
}

double Grid::total_volume() const {
  const double w = 2.0 * half_width_;
  return dim_ == 1 ? w : w * w;
}

Point Grid::center(int index) const {
  const double h = spacing();
  const int i = index % n_;
  const int j = index / n_;
  return Point(-half_width_ + (i + 0.5) * h, dim_ == 1 ? 0.0 : -half_width_ + (j + 0.5) * h);
}

Grid build_grid(int dim, double half_width, int cells_per_axis) {
  return Grid(dim, half_width, cells_per_axis);
}

Density::Density(Grid grid, Vector values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("density: value count does not match the grid");
  mass_ = grid_.cell_volume() * values_.sum();
}

Density Density::sample(const Grid& grid, const std::function<double(const Point&)>& f) {
  Vector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = f(grid.center(i));
  return Density(grid, std::move(v));
}

Density Density::operator-(const Density& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("density: grid mismatch");
  return Density(grid_, values_ - o.values_);
}

Density Density::operator+(const Density& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("density: grid mismatch");
  return Density(grid_, values_ + o.values_);
}

Density Density::scaled(double c) const { return Density(grid_, c * values_); }

double mass(const Density& f) { return f.mass(); }

}  // namespace subfp
