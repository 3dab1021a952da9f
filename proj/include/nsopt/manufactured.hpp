#pragma once

#include "nsopt/elements.hpp"

namespace nsopt {

/// Closed-form Navier-Stokes benchmark on the unit square: the velocity is
/// the curl of psi = x^2 (1-x)^2 y^2 (1-y)^2 (divergence free, zero trace),
/// the pressure is x - 1/2, and the load is -nu lap(y) + (y.grad)y + grad p.
struct ManufacturedSolution {
  double nu = 1.0;

  Vec2 velocity(const Vec2& x) const;
  Eigen::Matrix2d velocity_gradient(const Vec2& x) const;  //< rows are components
  double pressure(const Vec2& x) const;
  Vec2 load(const Vec2& x) const;
};

/// Velocity error norms against an analytic reference, by cellwise
/// quadrature of degree 8 (L-inf is the max over those quadrature points).
struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double linf = 0.0;
};

ErrorNorms velocity_error_norms(const FeFunction& fn,
                                const std::function<Vec2(const Vec2&)>& exact,
                                const std::function<Eigen::Matrix2d(const Vec2&)>& exact_grad);

/// L2 distance between two FE velocities on (possibly) different meshes of
/// the same domain; quadrature runs on the finer function's mesh.
double velocity_l2_distance(const FeFunction& coarse, const FeFunction& fine);

}  // namespace nsopt
