#include "subfp/force_field.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace subfp {

namespace {

double fd_step(const Point& x) { return 1e-5 * bracket(x); }

Point unit(int j) { return j == 0 ? Point(1.0, 0.0) : Point(0.0, 1.0); }

double spectral_norm(const Jacobian& a) {
  const Jacobian ata = a.transpose() * a;
  const double tr = ata.trace();
  const double det = ata.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return std::sqrt(std::max(0.0, 0.5 * tr + disc));
}

}  // namespace

ForceField::ForceField(Parts parts) : parts_(std::move(parts)) {
  if (parts_.dim != 1 && parts_.dim != 2)
    throw std::invalid_argument("force field: dim must be 1 or 2, got " + std::to_string(parts_.dim));
  if (!(parts_.gamma > 0.0 && parts_.gamma < 1.0))
    throw std::invalid_argument("force field: gamma must lie in (0,1), got " +
                                std::to_string(parts_.gamma));
  if (!(parts_.R0 > 0.0)) throw std::invalid_argument("force field: R0 must be positive");
  if (!parts_.force) throw std::invalid_argument("force field: missing force evaluator");
  if (parts_.potential && !parts_.potential_gradient)
    throw std::invalid_argument("force field: a potential needs its gradient");
  if (parts_.stream && !parts_.potential)
    throw std::invalid_argument("force field: a stream function needs a potential");
}

double ForceField::divergence(const Point& x) const {
  return parts_.divergence ? parts_.divergence(x) : divergence_fd(x);
}

Jacobian ForceField::jacobian(const Point& x) const {
  return parts_.jacobian ? parts_.jacobian(x) : jacobian_fd(x);
}

double ForceField::potential(const Point& x) const {
  if (!parts_.potential) throw std::logic_error("force field has no potential");
  return parts_.potential(x);
}

Point ForceField::potential_gradient(const Point& x) const {
  if (!parts_.potential_gradient) throw std::logic_error("force field has no potential");
  return parts_.potential_gradient(x);
}

double ForceField::stream(const Point& x) const {
  if (!parts_.stream) throw std::logic_error("force field has no stream function");
  return parts_.stream(x);
}

double ForceField::divergence_fd(const Point& x) const {
  const Jacobian d = jacobian_fd(x);
  return parts_.dim == 1 ? d(0, 0) : d.trace();
}

Jacobian ForceField::jacobian_fd(const Point& x) const {
  const double h = fd_step(x);
  Jacobian d = Jacobian::Zero();
  for (int j = 0; j < parts_.dim; ++j) {
    const Point col = (force(x + h * unit(j)) - force(x - h * unit(j))) / (2.0 * h);
    d.col(j) = col;
  }
  if (parts_.dim == 1) d.row(1).setZero();
  return d;
}

ForceField canonical_gradient_field(double gamma, double scale, int dim, double R0) {
  if (!(scale > 0.0)) throw std::invalid_argument("canonical field: scale must be positive");
  ForceField::Parts p;
  p.dim = dim;
  p.gamma = gamma;
  p.R0 = R0;
  p.kind = "canonical";
  p.params = {{"gamma", gamma}, {"scale", scale}};
  p.force = [=](const Point& x) -> Point { return scale * x * std::pow(bracket(x), gamma - 2.0); };
  p.jacobian = [=](const Point& x) -> Jacobian {
    const double b = bracket(x);
    Jacobian d = std::pow(b, gamma - 2.0) * Jacobian::Identity() +
                 (gamma - 2.0) * std::pow(b, gamma - 4.0) * x * x.transpose();
    d *= scale;
    if (dim == 1) {
      d(0, 1) = d(1, 0) = d(1, 1) = 0.0;
    }
    return d;
  };
  p.divergence = [=](const Point& x) {
    const double b = bracket(x);
    return scale * (dim * std::pow(b, gamma - 2.0) +
                    (gamma - 2.0) * x.squaredNorm() * std::pow(b, gamma - 4.0));
  };
  p.potential = [=](const Point& x) { return scale * std::pow(bracket(x), gamma) / gamma; };
  p.potential_gradient = p.force;
  return ForceField(std::move(p));
}

ScalarMap linear_modulation(double c) {
  return [c](const Point& x) { return 1.0 + c * x[0] / bracket(x); };
}

ForceField rotated_field(const ForceField& base, double amplitude, ScalarMap modulation) {
  if (base.dim() != 2) throw std::invalid_argument("rotated field: base field must be 2D");
  if (!base.has_potential()) throw std::invalid_argument("rotated field: base needs a potential");

  const double gamma = base.gamma();
  const bool uniform = !modulation;
  if (uniform) modulation = [](const Point&) { return 1.0; };

  // R(x) = J x <x>^{gamma-2}; div R = 0 identically
  auto rot = [gamma](const Point& x) -> Point {
    return rotate90(x) * std::pow(bracket(x), gamma - 2.0);
  };
  auto rot_jacobian = [gamma](const Point& x) -> Jacobian {
    Jacobian j;
    j << 0.0, -1.0, 1.0, 0.0;
    const double b = bracket(x);
    const Point grad_g = (gamma - 2.0) * std::pow(b, gamma - 4.0) * x;
    return std::pow(b, gamma - 2.0) * j + rotate90(x) * grad_g.transpose();
  };
  auto grad_mod = [modulation, uniform](const Point& x) -> Point {
    if (uniform) return Point::Zero();
    const double h = fd_step(x);
    Point g;
    for (int j = 0; j < 2; ++j)
      g[j] = (modulation(x + h * unit(j)) - modulation(x - h * unit(j))) / (2.0 * h);
    return g;
  };

  ForceField::Parts p;
  p.dim = 2;
  p.gamma = gamma;
  p.R0 = base.R0();
  p.kind = "rotated";
  p.params = base.params();
  p.params["amplitude"] = amplitude;
  p.force = [=](const Point& x) -> Point {
    return base.force(x) + amplitude * modulation(x) * rot(x);
  };
  p.jacobian = [=](const Point& x) -> Jacobian {
    return base.jacobian(x) +
           amplitude * (modulation(x) * rot_jacobian(x) + rot(x) * grad_mod(x).transpose());
  };
  p.divergence = [=](const Point& x) {
    return base.divergence(x) + amplitude * rot(x).dot(grad_mod(x));
  };
  p.potential = [base](const Point& x) { return base.potential(x); };
  p.potential_gradient = [base](const Point& x) { return base.potential_gradient(x); };

  // F0 = (a/s) J grad V for the canonical base, so e^{-V} F0 = J grad(-(a/s) e^{-V})
  if (uniform && base.kind() == "canonical") {
    const double scale = base.params().at("scale");
    p.stream = [base, amplitude, scale](const Point& x) {
      return -(amplitude / scale) * std::exp(-base.potential(x));
    };
  }
  return ForceField(std::move(p));
}

ForceField custom_field(int dim, double gamma, const Expression& f1, const Expression& f2,
                        double R0) {
  if (f1.empty() || (dim == 2 && f2.empty()))
    throw std::invalid_argument("custom field: missing component expression");
  ForceField::Parts p;
  p.dim = dim;
  p.gamma = gamma;
  p.R0 = R0;
  p.kind = "custom";
  p.force = [=](const Point& x) -> Point { return Point(f1(x), dim == 2 ? f2(x) : 0.0); };
  return ForceField(std::move(p));
}

ForceField zero_field(int dim) {
  ForceField::Parts p;
  p.dim = dim;
  p.gamma = 0.5;  // nominal; the field is outside the confinement hypotheses
  p.kind = "zero";
  p.force = [](const Point&) -> Point { return Point::Zero(); };
  p.divergence = [](const Point&) { return 0.0; };
  p.jacobian = [](const Point&) -> Jacobian { return Jacobian::Zero(); };
  p.potential = [](const Point&) { return 0.0; };
  p.potential_gradient = p.force;
  return ForceField(std::move(p));
}

ConditionReport verify_conditions(const ForceField& field, std::span<const Point> samples,
                                  double R0) {
  if (samples.empty()) throw std::invalid_argument("verify_conditions: empty sample set");
  const double gamma = field.gamma();
  ConditionReport rep;
  rep.inf_radial_constant = std::numeric_limits<double>::infinity();
  rep.sup_div_constant = -std::numeric_limits<double>::infinity();
  rep.sup_DF_constant = 0.0;
  for (const Point& x : samples) {
    const double r = x.norm();
    const double b = bracket(x);
    rep.sup_DF_constant =
        std::max(rep.sup_DF_constant, spectral_norm(field.jacobian(x)) / std::pow(b, gamma - 2.0));
    if (r <= R0) continue;
    ++rep.outside_count;
    rep.inf_radial_constant = std::min(
        rep.inf_radial_constant, x.dot(field.force(x)) / (r * std::pow(b, gamma - 1.0)));
    rep.sup_div_constant =
        std::max(rep.sup_div_constant, field.divergence(x) / std::pow(r, gamma - 2.0));
  }
  rep.sample_count = static_cast<int>(samples.size());
  if (rep.outside_count == 0)
    throw std::invalid_argument("verify_conditions: no samples outside B_R0");
  rep.pass = rep.inf_radial_constant > 0.0 && std::isfinite(rep.sup_div_constant) &&
             std::isfinite(rep.sup_DF_constant);
  return rep;
}

namespace {

double case1_residual(const ForceField& field, const ScalarMap& V, const VectorMap& gradV,
                      std::span<const Point> samples, double step_factor, bool fourth_order) {
  if (samples.empty()) throw std::invalid_argument("check_case1_structure: empty sample set");
  const int dim = field.dim();
  auto W = [&](const Point& x) -> Point {
    return std::exp(-V(x)) * (field.force(x) - gradV(x));
  };
  double worst = 0.0;
  for (const Point& x : samples) {
    const double h = step_factor * bracket(x);
    double div = 0.0;
    for (int j = 0; j < dim; ++j) {
      const Point e = unit(j);
      if (fourth_order) {
        div += (-W(x + 2 * h * e)[j] + 8 * W(x + h * e)[j] - 8 * W(x - h * e)[j] +
                W(x - 2 * h * e)[j]) /
               (12.0 * h);
      } else {
        div += (W(x + h * e)[j] - W(x - h * e)[j]) / (2.0 * h);
      }
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

}  // namespace

double check_case1_structure(const ForceField& field, std::span<const Point> samples) {
  if (!field.has_potential())
    throw std::invalid_argument("check_case1_structure: field has no potential; supply V");
  return case1_residual(
      field, [&](const Point& x) { return field.potential(x); },
      [&](const Point& x) { return field.potential_gradient(x); }, samples, 1e-5, false);
}

double check_case1_structure(const ForceField& field, const ScalarMap& V,
                             std::span<const Point> samples) {
  const int dim = field.dim();
  auto gradV = [&](const Point& x) -> Point {
    const double h = 1e-3 * bracket(x);
    Point g = Point::Zero();
    for (int j = 0; j < dim; ++j) {
      const Point e = unit(j);
      g[j] = (-V(x + 2 * h * e) + 8 * V(x + h * e) - 8 * V(x - h * e) + V(x - 2 * h * e)) /
             (12.0 * h);
    }
    return g;
  };
  return case1_residual(field, V, gradV, samples, 1e-3, true);
}

std::vector<Point> radial_samples(int dim, double r_min, double r_max, int radii, int angles) {
  if (radii < 1 || !(r_min > 0.0) || !(r_max >= r_min))
    throw std::invalid_argument("radial_samples: bad range");
  std::vector<Point> out;
  for (int i = 0; i < radii; ++i) {
    const double t = radii == 1 ? 0.0 : static_cast<double>(i) / (radii - 1);
    const double r = r_min * std::pow(r_max / r_min, t);
    if (dim == 1) {
      out.emplace_back(r, 0.0);
      out.emplace_back(-r, 0.0);
    } else {
      for (int a = 0; a < angles; ++a) {
        const double phi = 2.0 * M_PI * (a + 0.5) / angles;
        out.emplace_back(r * std::cos(phi), r * std::sin(phi));
      }
    }
  }
  return out;
}

std::vector<Point> random_samples(int dim, double r_max, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Point p(u(rng), dim == 2 ? u(rng) : 0.0);
    if (p.norm() <= 1.0) out.push_back(r_max * p);
  }
  return out;
}

}  // namespace subfp
